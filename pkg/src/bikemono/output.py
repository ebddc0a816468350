"""CSV, JSON and SVG writers.  Every file carries the tool version and the run config."""

from __future__ import annotations

import csv
import io
import json
import math
from html import escape

import numpy as np

TOOL = "bikemono"
CLASS_COLORS = {
    "Elliptic": "#4575b4",
    "Parabolic": "#fee090",
    "Parabolic?": "#fee090",
    "Identity": "#fee090",
    "Hyperbolic": "#d73027",
}
FRONT_COLOR = "#1f4fd1"
BACK_COLOR = "#d11f1f"


def _version() -> str:
    from bikemono import __version__

    return __version__


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def dumps_json(payload, config: dict | None = None) -> str:
    doc = {"tool": TOOL, "version": _version(), "config": _jsonable(config or {}), "result": _jsonable(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, payload, config: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_json(payload, config))


def csv_text(rows, config: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# {TOOL} {_version()}\n")
    buf.write("# config: " + json.dumps(_jsonable(config or {}), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def write_csv(path, rows, config: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(rows, config))


def read_csv(path) -> list[list[str]]:
    """Rows of a file written by :func:`write_csv`, comment lines dropped."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return [row for row in csv.reader(lines)]


# ------------------------------------------------------------------ SVG


class Svg:
    def __init__(self, width: float, height: float, config: dict | None = None, title: str = ""):
        self.width, self.height = width, height
        self.parts: list[str] = []
        self.meta = json.dumps({"tool": TOOL, "version": _version(), "config": _jsonable(config or {})},
                               sort_keys=True)
        self.title = title

    def rect(self, x, y, w, h, fill, extra=""):
        self.parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}" {extra}/>')

    def polyline(self, pts, stroke, width=1.0, extra=""):
        if len(pts) < 2:
            return
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in pts)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}" {extra}/>')

    def circle(self, x, y, r, fill="none", stroke="black", width=1.0):
        self.parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r:.3f}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{width}"/>')

    def text(self, x, y, s, size=12, anchor="start"):
        self.parts.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="sans-serif" '
                          f'text-anchor="{anchor}">{escape(str(s))}</text>')

    def group(self, transform: str):
        self.parts.append(f'<g transform="{transform}">')

    def end_group(self):
        self.parts.append("</g>")

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width:.0f}" height="{self.height:.0f}" '
                f'viewBox="0 0 {self.width:.0f} {self.height:.0f}">')
        meta = f"<metadata>{escape(self.meta)}</metadata>"
        title = f"<title>{escape(self.title)}</title>" if self.title else ""
        return "\n".join([head, meta, title, *self.parts, "</svg>"]) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.render())


class _Frame:
    """Affine map from data coordinates into a pixel box (y up), equal aspect optional."""

    def __init__(self, xs, ys, box, equal=True, pad=0.05):
        x0, y0, w, h = box
        xmin, xmax = float(np.min(xs)), float(np.max(xs))
        ymin, ymax = float(np.min(ys)), float(np.max(ys))
        dx, dy = max(xmax - xmin, 1e-12), max(ymax - ymin, 1e-12)
        xmin, xmax = xmin - pad * dx, xmax + pad * dx
        ymin, ymax = ymin - pad * dy, ymax + pad * dy
        sx, sy = w / (xmax - xmin), h / (ymax - ymin)
        if equal:
            sx = sy = min(sx, sy)
        self.sx, self.sy = sx, sy
        cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
        self.ox, self.oy = x0 + w / 2 - sx * cx, y0 + h / 2 + sy * cy

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.stack([self.ox + self.sx * pts[..., 0], self.oy - self.sy * pts[..., 1]], axis=-1)


def phase_grid_svg(grid, config: dict | None = None, cell: float = 12.0) -> Svg:
    na, nb = grid.traces.shape
    margin = 50
    svg = Svg(margin * 2 + nb * cell, margin * 2 + na * cell + 30, config, f"{grid.kind} monodromy types")
    # a runs upward, b to the right
    for i in range(na):
        for j in range(nb):
            y = margin + (na - 1 - i) * cell
            svg.rect(margin + j * cell, y, cell, cell, CLASS_COLORS.get(grid.classes[i][j], "#999999"))
    svg.text(margin + nb * cell / 2, margin + na * cell + 20, f"b  [{grid.b_axis[1]:g}, {grid.b_axis[2]:g}]",
             anchor="middle")
    svg.text(12, margin + na * cell / 2, f"a [{grid.a_axis[1]:g}, {grid.a_axis[2]:g}]")
    x = margin
    for name in ("Elliptic", "Parabolic", "Hyperbolic"):
        svg.rect(x, margin + na * cell + 30, 10, 10, CLASS_COLORS[name])
        svg.text(x + 14, margin + na * cell + 39, name, size=10)
        x += 90
    return svg


def _curve_panel(svg: Svg, box, curves, dots=(), label: str = ""):
    allpts = np.concatenate([np.asarray(c[0]) for c in curves if len(c[0])])
    frame = _Frame(allpts[:, 0], allpts[:, 1], box)
    for pts, color in curves:
        svg.polyline(frame(pts), color, 1.5)
    for p, color in dots:
        q = frame(np.asarray(p))
        svg.circle(q[0], q[1], 3.0, fill=color, stroke=color)
    if label:
        svg.text(box[0] + 4, box[1] + 14, label, size=12)


def backtrack_svg(front, tracks, config: dict | None = None, n: int = 2000) -> Svg:
    """Front in blue, back tracks in red, cusps as black dots."""
    svg = Svg(500, 500, config, f"back tracks of {front.label}")
    _backtrack_panel(svg, (10, 10, 480, 480), front, tracks, n)
    return svg


def _backtrack_panel(svg, box, front, tracks, n=2000, label=""):
    t = front.grid(n, endpoint=True)
    curves = [(front.position(t), FRONT_COLOR)]
    dots = []
    for bt in tracks:
        stride = max(1, len(bt.ts) // n)
        curves.append((bt.gamma[::stride], BACK_COLOR))
        for tc, _ in bt.cusps:
            th = np.interp(tc, bt.ts, bt.theta)
            dots.append((front.position(tc) + bt.ell * np.array([np.cos(th), np.sin(th)]), "black"))
    _curve_panel(svg, box, curves, dots, label)


def development_svg(dev, config: dict | None = None, n: int = 4000) -> Svg:
    """Development drawn in the Poincare disk."""
    svg = Svg(500, 500, config, f"development of {dev.source}")
    w = dev.disk()
    stride = max(1, len(w) // n)
    pts = np.stack([w.real, w.imag], axis=1)[::stride]
    frame = _Frame(np.array([-1.0, 1.0]), np.array([-1.0, 1.0]), (10, 10, 480, 480), pad=0.02)
    c = frame(np.array([0.0, 0.0]))
    svg.circle(c[0], c[1], frame.sx, stroke="#888888")
    svg.polyline(frame(pts), FRONT_COLOR, 1.2)
    return svg


def sweep_svg(sweep, config: dict | None = None) -> Svg:
    """Class strip along ell with the transitions marked."""
    ells = np.asarray(sweep.ells)
    width, height, margin = 640, 120, 40
    svg = Svg(width, height, config, "class along bike length")
    lo, hi = float(ells[0]), float(ells[-1])
    span = max(hi - lo, 1e-12)
    step = (width - 2 * margin) / max(len(ells), 1)
    for k, c in enumerate(sweep.classes):
        svg.rect(margin + k * step, 30, step + 0.5, 30, CLASS_COLORS.get(c, "#999999"))
    for tr in sweep.transitions:
        x = margin + (tr["ell"] - lo) / span * (width - 2 * margin)
        svg.polyline([(x, 25), (x, 65)], "black", 1.5)
        svg.text(x, 80, f"{tr['ell']:.6g}", size=10, anchor="middle")
    svg.text(margin, 20, f"ell in [{lo:g}, {hi:g}]", size=11)
    return svg


def fish_demo_svg(front, panels, config: dict | None = None) -> Svg:
    """Four panels: (ell, tracks) pairs, two below and two above the elliptic gap."""
    svg = Svg(820, 820, config, "fish front and back tracks")
    for k, (ell, tracks) in enumerate(panels):
        box = (10 + (k % 2) * 405, 10 + (k // 2) * 405, 395, 395)
        label = f"ell={ell:g}"
        if tracks:
            label += f"  rho={tracks[0].rho}  mu={tracks[0].mu}"
        _backtrack_panel(svg, box, front, tracks[:1], label=label)
    return svg
