"""Plane curves: representations, differential invariants and named builders.

Every curve is an immutable :class:`PlaneCurve`.  Analytic curves carry exact
first and second derivatives; polygons carry a :class:`PolygonPath` and are
parametrized by arclength; sampled curves come either from raw points
(periodic cubic spline) or from :func:`arclength_reparam`.

Position/derivative callables are vectorized: ``t`` of shape ``(m,)`` gives
arrays of shape ``(m, 2)``, a scalar ``t`` gives shape ``(2,)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

ArrayFn = Callable[[np.ndarray], np.ndarray]

DEFAULT_SAMPLES = 4096
MAX_UNWRAP_SAMPLES = 2**20


class CurveError(ValueError):
    """Invalid curve specification or parameters."""


class ImmersionError(ValueError):
    """The curve has (numerically) vanishing velocity."""


class SamplingError(ValueError):
    """Sampling too coarse for a robust topological invariant."""


@dataclass(frozen=True)
class PolygonPath:
    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise CurveError("polygon needs at least two 2D vertices")
        if self.closed and len(v) > 2 and np.allclose(v[0], v[-1], rtol=0, atol=1e-15):
            v = v[:-1]
        edges = np.diff(np.vstack([v, v[:1]]) if self.closed else v, axis=0)
        if np.any(np.hypot(edges[:, 0], edges[:, 1]) == 0):
            raise CurveError("degenerate polygon: repeated consecutive vertex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def edges(self) -> np.ndarray:
        v = self.vertices
        pts = np.vstack([v, v[:1]]) if self.closed else v
        return np.diff(pts, axis=0)

    @property
    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.hypot(e[:, 0], e[:, 1])

    @property
    def length(self) -> float:
        return float(self.edge_lengths.sum())

    def exterior_angles(self) -> np.ndarray:
        """Signed turning angle at each vertex, in (-pi, pi)."""
        e = self.edges
        ang = np.arctan2(e[:, 1], e[:, 0])
        turn = np.diff(np.append(ang, ang[0]) if self.closed else ang)
        turn = (turn + np.pi) % (2 * np.pi) - np.pi
        return turn


@dataclass(frozen=True)
class PlaneCurve:
    kind: str  # "analytic" | "polygon" | "sampled"
    position: ArrayFn
    d1: ArrayFn
    d2: ArrayFn
    t_span: tuple[float, float]
    closed: bool
    samples_hint: int = DEFAULT_SAMPLES
    name: str = ""
    params: dict = field(default_factory=dict)
    polygon: PolygonPath | None = None

    @property
    def period(self) -> float:
        return self.t_span[1] - self.t_span[0]

    def grid(self, n: int | None = None, endpoint: bool | None = None) -> np.ndarray:
        n = n or self.samples_hint
        if endpoint is None:
            endpoint = not self.closed
        return np.linspace(self.t_span[0], self.t_span[1], n + (1 if endpoint else 0), endpoint=endpoint)

    def scaled(self, c: float) -> "PlaneCurve":
        """Homothety about the origin by ``c > 0``."""
        if not c > 0:
            raise CurveError("scale factor must be positive")
        if self.polygon is not None:
            out = polygon_curve(self.polygon.vertices * c, self.polygon.closed)
            return replace(out, name=self.name, params={**self.params, "scale": c})
        pos, f1, f2 = self.position, self.d1, self.d2
        return replace(
            self,
            position=lambda t: c * pos(t),
            d1=lambda t: c * f1(t),
            d2=lambda t: c * f2(t),
            params={**self.params, "scale": self.params.get("scale", 1.0) * c},
        )

    def diameter(self, n: int = 1024) -> float:
        if self.polygon is not None:
            p = self.polygon.vertices
        else:
            p = self.position(self.grid(n, endpoint=True))
        return float(np.max(np.ptp(p, axis=0)) if len(p) > 1 else 0.0)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        simple = {k: v for k, v in self.params.items() if isinstance(v, (int, float))}
        return self.name + ":" + ",".join(f"{k}={v:g}" for k, v in simple.items())


def _stack(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x, y = np.broadcast_arrays(x, y)
    return np.stack([x, y], axis=-1)


def analytic_curve(pos, d1, d2, t_span, closed, name, params, samples_hint=DEFAULT_SAMPLES) -> PlaneCurve:
    def wrap(f):
        return lambda t: _stack(*f(np.asarray(t, dtype=float)))

    return PlaneCurve(
        kind="analytic",
        position=wrap(pos),
        d1=wrap(d1),
        d2=wrap(d2),
        t_span=(float(t_span[0]), float(t_span[1])),
        closed=closed,
        samples_hint=samples_hint,
        name=name,
        params=dict(params),
    )


def polygon_curve(vertices, closed: bool = True, name: str = "polygon", params: dict | None = None) -> PlaneCurve:
    poly = PolygonPath(np.asarray(vertices, dtype=float), closed)
    v = poly.vertices
    starts = v if closed else v[:-1]
    lengths = poly.edge_lengths
    units = poly.edges / lengths[:, None]
    knots = np.concatenate([[0.0], np.cumsum(lengths)])
    total = knots[-1]

    def locate(t):
        t = np.asarray(t, dtype=float)
        if closed:
            t = np.where((t >= total) & (t > 0), t - total * np.floor(t / total), t)
        k = np.clip(np.searchsorted(knots, t, side="right") - 1, 0, len(lengths) - 1)
        return t, k

    def pos(t):
        t, k = locate(t)
        return starts[k] + (t - knots[k])[..., None] * units[k]

    def d1(t):
        _, k = locate(t)
        return units[k]

    def d2(t):
        return np.zeros(np.shape(t) + (2,))

    return PlaneCurve(
        kind="polygon",
        position=pos,
        d1=d1,
        d2=d2,
        t_span=(0.0, float(total)),
        closed=closed,
        name=name,
        params=dict(params or {}),
        polygon=poly,
    )


def sampled_curve(points, closed: bool = True, name: str = "sampled") -> PlaneCurve:
    """Curve through raw points, uniform parameter, periodic cubic spline when closed."""
    p = np.asarray(points, dtype=float)
    if closed and np.allclose(p[0], p[-1]):
        p = p[:-1]
    if len(p) < 4:
        raise CurveError("sampled curve needs at least four points")
    if closed:
        p = np.vstack([p, p[:1]])
    t = np.arange(len(p), dtype=float)
    spline = CubicSpline(t, p, axis=0, bc_type="periodic" if closed else "not-a-knot")
    return PlaneCurve(
        kind="sampled",
        position=lambda s: spline(s),
        d1=lambda s: spline(s, 1),
        d2=lambda s: spline(s, 2),
        t_span=(0.0, float(t[-1])),
        closed=closed,
        samples_hint=max(DEFAULT_SAMPLES, 8 * len(p)),
        name=name,
    )


# ---------------------------------------------------------------- builders


def circle(r: float = 1.0, cx: float = 0.0, cy: float = 0.0) -> PlaneCurve:
    _positive(r=r)
    return analytic_curve(
        lambda t: (cx + r * np.cos(t), cy + r * np.sin(t)),
        lambda t: (-r * np.sin(t), r * np.cos(t)),
        lambda t: (-r * np.cos(t), -r * np.sin(t)),
        (0.0, 2 * np.pi),
        True,
        "circle",
        {"r": r},
    )


def ellipse(a: float, b: float) -> PlaneCurve:
    _positive(a=a, b=b)
    return analytic_curve(
        lambda t: (a * np.cos(t), b * np.sin(t)),
        lambda t: (-a * np.sin(t), b * np.cos(t)),
        lambda t: (-a * np.cos(t), -b * np.sin(t)),
        (0.0, 2 * np.pi),
        True,
        "ellipse",
        {"a": a, "b": b},
    )


def arc(r: float = 1.0, angle: float = np.pi) -> PlaneCurve:
    """Open circular arc from (r, 0), counterclockwise through ``angle``."""
    _positive(r=r, angle=angle)
    c = circle(r)
    return replace(c, t_span=(0.0, float(angle)), closed=False, name="arc", params={"r": r, "angle": angle})


def segment(length: float, angle: float = 0.0) -> PlaneCurve:
    _positive(length=length)
    ux, uy = math.cos(angle), math.sin(angle)
    return analytic_curve(
        lambda t: (ux * t, uy * t),
        lambda t: (ux + 0 * t, uy + 0 * t),
        lambda t: (0 * t, 0 * t),
        (0.0, length),
        False,
        "segment",
        {"length": length, "angle": angle},
    )


def rectangle(a: float, b: float) -> PlaneCurve:
    """The path (0,0) -> (a,0) -> (a,b) -> (0,b) -> (0,0)."""
    _positive(a=a, b=b)
    return polygon_curve([(0, 0), (a, 0), (a, b), (0, b)], True, "rectangle", {"a": a, "b": b})


def regular_polygon(n: int, r: float = 1.0) -> PlaneCurve:
    n = int(n)
    if n < 3:
        raise CurveError("regular polygon needs n >= 3")
    _positive(r=r)
    phi = 2 * np.pi * np.arange(n) / n
    return polygon_curve(np.c_[r * np.cos(phi), r * np.sin(phi)], True, "regular-polygon", {"n": n, "r": r})


def fish_back() -> PlaneCurve:
    """Rear track (2 cos t, sin 2t sin^2 t) of the fish example."""
    return analytic_curve(*_fish_back_parts(), (0.0, 2 * np.pi), True, "fish-back", {})


def _fish_back_parts():
    def pos(t):
        return 2 * np.cos(t), np.sin(2 * t) * np.sin(t) ** 2

    def d1(t):
        return -2 * np.sin(t), 2 * np.cos(2 * t) * np.sin(t) ** 2 + np.sin(2 * t) ** 2

    def d2(t):
        return -2 * np.cos(t), -4 * np.sin(2 * t) * np.sin(t) ** 2 + 3 * np.sin(4 * t)

    return pos, d1, d2


def _fish_offset(t):
    """(w, w', w'') for w = sqrt(2/(3 - cos 6t)) * (-1, sin 3t); |w| = 1."""
    q = 3 - np.cos(6 * t)
    s = np.sqrt(2 / q)
    s1 = -3 * np.sqrt(2) * np.sin(6 * t) * q**-1.5
    s2 = -18 * np.sqrt(2) * np.cos(6 * t) * q**-1.5 + 27 * np.sqrt(2) * np.sin(6 * t) ** 2 * q**-2.5
    s3t, c3t = np.sin(3 * t), np.cos(3 * t)
    w = (-s, s * s3t)
    w1 = (-s1, s1 * s3t + 3 * s * c3t)
    w2 = (-s2, s2 * s3t + 6 * s1 * c3t - 9 * s * s3t)
    return w, w1, w2


def fish_front() -> PlaneCurve:
    """Front track Gamma = gamma + sqrt(2/(3 - cos 6t)) (-1, sin 3t) of the fish pair (bike length 1)."""
    bp, b1, b2 = _fish_back_parts()

    def pos(t):
        (x, y), (wx, wy) = bp(t), _fish_offset(t)[0]
        return x + wx, y + wy

    def d1(t):
        (x, y), (wx, wy) = b1(t), _fish_offset(t)[1]
        return x + wx, y + wy

    def d2(t):
        (x, y), (wx, wy) = b2(t), _fish_offset(t)[2]
        return x + wx, y + wy

    return analytic_curve(pos, d1, d2, (0.0, 2 * np.pi), True, "fish-front", {}, samples_hint=8192)


def fourier(ax, bx, ay, by, name: str = "fourier") -> PlaneCurve:
    """x(t) = sum_k ax[k] cos kt + bx[k] sin kt (k from 0), likewise y."""
    coef = [np.asarray(c, dtype=float) for c in (ax, bx, ay, by)]
    n = max(len(c) for c in coef)
    coef = [np.pad(c, (0, n - len(c))) for c in coef]
    if not all(np.all(np.isfinite(c)) for c in coef):
        raise CurveError("fourier coefficients must be finite")
    k = np.arange(n, dtype=float)
    cax, cbx, cay, cby = coef

    def series(t, order):
        t = np.asarray(t, dtype=float)
        kt = np.multiply.outer(t, k)
        c, s = np.cos(kt), np.sin(kt)
        kk = k**order
        # derivative of order m rotates (cos, sin) by m*pi/2
        if order % 4 == 0:
            cc, ss = c, s
        elif order % 4 == 1:
            cc, ss = -s, c
        elif order % 4 == 2:
            cc, ss = -c, -s
        else:
            cc, ss = s, -c
        return (cc * cax + ss * cbx) @ kk, (cc * cay + ss * cby) @ kk

    return analytic_curve(
        lambda t: series(t, 0),
        lambda t: series(t, 1),
        lambda t: series(t, 2),
        (0.0, 2 * np.pi),
        True,
        name,
        {"ax": cax.tolist(), "bx": cbx.tolist(), "ay": cay.tolist(), "by": cby.tolist()},
    )


def figure_eight(a: float = 1.0) -> PlaneCurve:
    """Lemniscate of Gerono (a sin t, a sin t cos t); total turning zero."""
    _positive(a=a)
    c = fourier([0.0], [0.0, a], [0.0], [0.0, 0.0, a / 2], name="figure-eight")
    return replace(c, params={"a": a})


def limacon(a: float, b: float) -> PlaneCurve:
    """r = b + a cos t; has an inner loop (turning number 2) when a > b."""
    _positive(a=a, b=b)
    # (b + a cos t)(cos t, sin t) = (a/2 + b cos t + a/2 cos 2t, b sin t + a/2 sin 2t)
    c = fourier([a / 2, b, a / 2], [0.0], [0.0], [0.0, b, a / 2], name="limacon")
    return replace(c, params={"a": a, "b": b})


def support_curve(r0: float, a=(), b=()) -> PlaneCurve:
    """Closed convex curve with support function h(phi) = r0 + sum_{k>=2} a_k cos k phi + b_k sin k phi.

    ``a[j]``, ``b[j]`` are the coefficients of frequency ``k = j + 2``.  The
    radius of curvature is h + h'' and must stay positive.
    """
    _positive(r0=r0)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = max(len(a), len(b))
    a, b = np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b)))
    k = np.arange(2, n + 2, dtype=float)
    if np.sum((k**2 - 1) * (np.abs(a) + np.abs(b))) >= r0:
        raise CurveError("support coefficients too large: radius of curvature may vanish")

    def h(phi, m):
        phi = np.asarray(phi, dtype=float)
        kp = np.multiply.outer(phi, k)
        c, s = np.cos(kp), np.sin(kp)
        km = k**m
        if m % 4 == 0:
            val = c @ (a * km) + s @ (b * km)
        elif m % 4 == 1:
            val = -s @ (a * km) + c @ (b * km)
        elif m % 4 == 2:
            val = -c @ (a * km) - s @ (b * km)
        else:
            val = s @ (a * km) - c @ (b * km)
        return val + (r0 if m == 0 else 0.0)

    def pos(p):
        h0, h1 = h(p, 0), h(p, 1)
        c, s = np.cos(p), np.sin(p)
        return h0 * c - h1 * s, h0 * s + h1 * c

    def d1(p):
        rho = h(p, 0) + h(p, 2)
        return -rho * np.sin(p), rho * np.cos(p)

    def d2(p):
        rho, rho1 = h(p, 0) + h(p, 2), h(p, 1) + h(p, 3)
        c, s = np.cos(p), np.sin(p)
        return -rho1 * s - rho * c, rho1 * c - rho * s

    return analytic_curve(pos, d1, d2, (0.0, 2 * np.pi), True, "support", {"r0": r0, "a": a.tolist(), "b": b.tolist()})


def tangent_arc(length: float, turning: float, a=(), b=()) -> PlaneCurve:
    """Open unit-speed arc with curvature kappa(s) proportional to 1 + sum a_k cos(k pi s/L) + b_k sin(k pi s/L).

    The curvature profile is normalized so the total turning is ``turning``.
    Positions are obtained by Gauss-Legendre quadrature of the unit tangent.
    """
    _positive(length=length)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = max(len(a), len(b))
    a, b = np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b)))
    k = np.arange(1, n + 1, dtype=float)
    w = k * np.pi / length
    # integral of the unnormalized profile over [0, L]
    total = length + np.sum(b * (1 - np.cos(k * np.pi)) / w) if n else length
    scale = turning / total

    def kappa(s):
        s = np.asarray(s, dtype=float)
        ws = np.multiply.outer(s, w)
        return scale * (1 + np.cos(ws) @ a + np.sin(ws) @ b)

    def phi(s):
        s = np.asarray(s, dtype=float)
        ws = np.multiply.outer(s, w)
        return scale * (s + np.sin(ws) @ (a / w) + (1 - np.cos(ws)) @ (b / w))

    nodes, weights = leggauss(64)

    def pos(s):
        s = np.asarray(s, dtype=float)
        # map nodes from [-1, 1] to [0, s]
        u = np.multiply.outer(s, (nodes + 1) / 2)
        ph = phi(u)
        half = s / 2
        return (np.cos(ph) @ weights) * half, (np.sin(ph) @ weights) * half

    def d1(s):
        ph = phi(s)
        return np.cos(ph), np.sin(ph)

    def d2(s):
        ph, kp = phi(s), kappa(s)
        return -kp * np.sin(ph), kp * np.cos(ph)

    return analytic_curve(pos, d1, d2, (0.0, length), False, "tangent-arc",
                          {"length": length, "turning": turning, "a": a.tolist(), "b": b.tolist()})


def _positive(**kw):
    for key, val in kw.items():
        if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
            raise CurveError(f"parameter {key} must be positive, got {val!r}")


_BUILDERS: dict[str, tuple[Callable[..., PlaneCurve], tuple[str, ...]]] = {
    "circle": (circle, ("r", "cx", "cy")),
    "ellipse": (ellipse, ("a", "b")),
    "arc": (arc, ("r", "angle")),
    "segment": (segment, ("length", "angle")),
    "rectangle": (rectangle, ("a", "b")),
    "regular-polygon": (regular_polygon, ("n", "r")),
    "polygon": (lambda vertices, closed=True: polygon_curve(vertices, closed), ("vertices", "closed")),
    "fish": (fish_front, ()),
    "fish-front": (fish_front, ()),
    "fish-back": (fish_back, ()),
    "fourier": (fourier, ("ax", "bx", "ay", "by")),
    "figure-eight": (figure_eight, ("a",)),
    "limacon": (limacon, ("a", "b")),
    "support": (support_curve, ("r0", "a", "b")),
    "tangent-arc": (tangent_arc, ("length", "turning", "a", "b")),
    "sampled": (lambda points, closed=True: sampled_curve(points, closed), ("points", "closed")),
}


def make_named_curve(name: str, *args, **params) -> PlaneCurve:
    """Build a curve by name; positional args follow the builder's parameter order.

    >>> make_named_curve("ellipse", 2, 1).params
    {'a': 2, 'b': 1}
    """
    try:
        builder, names = _BUILDERS[name]
    except KeyError:
        raise CurveError(f"unknown curve {name!r}; known: {', '.join(sorted(_BUILDERS))}") from None
    if len(args) > len(names):
        raise CurveError(f"{name} takes at most {len(names)} parameters")
    unknown = set(params) - set(names)
    if unknown:
        raise CurveError(f"unknown parameters for {name}: {sorted(unknown)}")
    try:
        return builder(*args, **params)
    except TypeError as exc:
        raise CurveError(f"bad parameters for {name}: {exc}") from None


def parse_curve_spec(spec) -> PlaneCurve:
    """Accept ``"ellipse:2,1"``, a JSON string, or a dict ``{"kind": ..., "params": {...}}``."""
    if isinstance(spec, PlaneCurve):
        return spec
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            spec = json.loads(text)
        else:
            name, _, rest = text.partition(":")
            args = [float(x) for x in rest.split(",") if x.strip()] if rest else []
            return make_named_curve(name.strip(), *args)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise CurveError(f"cannot parse curve spec {spec!r}")
    params = dict(spec.get("params", {}))
    params.pop("arclength", None)
    scale = params.pop("scale", spec.get("scale", 1.0))
    curve = make_named_curve(spec["kind"], **params)
    return curve if scale == 1.0 else curve.scaled(scale)


def curve_spec_json(curve: PlaneCurve) -> dict:
    """Inverse of :func:`parse_curve_spec` for built-in curves."""
    params = {k: v for k, v in curve.params.items() if k not in ("scale", "arclength")}
    out = {"kind": curve.name, "params": params}
    if curve.params.get("scale", 1.0) != 1.0:
        out["scale"] = curve.params["scale"]
    return out


# ----------------------------------------------------------- invariants


def curvature(curve: PlaneCurve, t) -> np.ndarray | float:
    """Signed curvature (x'y'' - y'x'') / |v|^3; zero on polygon edges."""
    v, a = curve.d1(t), curve.d2(t)
    speed = np.hypot(v[..., 0], v[..., 1])
    if np.any(speed <= 1e-14 * max(1.0, float(np.max(np.abs(a))))):
        raise ImmersionError(f"velocity vanishes on {curve.name}")
    k = (v[..., 0] * a[..., 1] - v[..., 1] * a[..., 0]) / speed**3
    return float(k) if np.ndim(k) == 0 else k


def max_abs_curvature(curve: PlaneCurve, n: int | None = None) -> float:
    if curve.kind == "polygon":
        return math.inf
    return float(np.max(np.abs(curvature(curve, curve.grid(n or 4 * curve.samples_hint, endpoint=True)))))


_GL_NODES, _GL_WEIGHTS = leggauss(16)


def _speed_integral(curve: PlaneCurve, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Integral of |d1| over [lo, hi], elementwise, 16-point Gauss-Legendre."""
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    u = mid[..., None] + half[..., None] * _GL_NODES
    v = curve.d1(u)
    return (np.hypot(v[..., 0], v[..., 1]) @ _GL_WEIGHTS) * half


def arclength_table(curve: PlaneCurve, n: int) -> tuple[np.ndarray, np.ndarray]:
    t = np.linspace(*curve.t_span, n + 1)
    seg = _speed_integral(curve, t[:-1], t[1:])
    return t, np.concatenate([[0.0], np.cumsum(seg)])


def curve_length(curve: PlaneCurve, n: int | None = None) -> float:
    if curve.polygon is not None:
        return curve.polygon.length
    return float(arclength_table(curve, n or curve.samples_hint)[1][-1])


def arclength_reparam(curve: PlaneCurve, n: int | None = None) -> PlaneCurve:
    """Unit-speed reparametrization on [0, L].

    The arclength function is tabulated by composite Gauss-Legendre quadrature
    on ``n`` cells; its inverse is evaluated by Newton iteration, so derivatives
    of the result are exact (chain rule) rather than interpolated.
    """
    n = n or curve.samples_hint
    if n < 16:
        raise CurveError("arclength_reparam needs n >= 16")
    if curve.kind == "polygon":
        return curve
    t_tab, s_tab = arclength_table(curve, n)
    speeds = np.hypot(*curve.d1(t_tab).T)
    if np.any(speeds <= 1e-12 * speeds.max()):
        raise ImmersionError(f"velocity vanishes on {curve.name}")
    total = float(s_tab[-1])
    t0 = t_tab[0]

    def param_of(s):
        s = np.asarray(s, dtype=float)
        if curve.closed:
            wraps = np.floor(s / total)
            s_red = s - wraps * total
        else:
            wraps, s_red = 0.0, s
        t = np.interp(s_red, s_tab, t_tab)
        k = np.clip(np.searchsorted(t_tab, t, side="right") - 1, 0, n - 1)
        for _ in range(4):
            f = s_tab[k] + _speed_integral(curve, t_tab[k], t) - s_red
            v = curve.d1(t)
            t = t - f / np.hypot(v[..., 0], v[..., 1])
        return t + wraps * curve.period if curve.closed else t

    def pos(s):
        return curve.position(param_of(s))

    def d1(s):
        v = curve.d1(param_of(s))
        return v / np.hypot(v[..., 0], v[..., 1])[..., None]

    def d2(s):
        t = param_of(s)
        v, a = curve.d1(t), curve.d2(t)
        sp2 = v[..., 0] ** 2 + v[..., 1] ** 2
        dot = v[..., 0] * a[..., 0] + v[..., 1] * a[..., 1]
        # d/ds (v/|v|) = (a |v|^2 - v (v.a)) / |v|^4
        return (a * sp2[..., None] - v * dot[..., None]) / (sp2**2)[..., None]

    return PlaneCurve(
        kind="sampled",
        position=pos,
        d1=d1,
        d2=d2,
        t_span=(0.0, total),
        closed=curve.closed,
        samples_hint=n,
        name=curve.name,
        params={**curve.params, "arclength": True},
    )


def _unwrapped_turning(curve: PlaneCurve, n: int) -> float:
    """Total turning of d1 over one period by guarded nearest-branch unwrapping."""
    while True:
        t = curve.grid(n, endpoint=True)
        v = curve.d1(t)
        ang = np.arctan2(v[:, 1], v[:, 0])
        step = (np.diff(ang) + np.pi) % (2 * np.pi) - np.pi
        if np.all(np.abs(step) < np.pi / 2):
            return float(step.sum())
        if n >= MAX_UNWRAP_SAMPLES:
            raise SamplingError(f"angle unwrapping failed on {curve.name} at {n} samples")
        n *= 2


def rotation_number(curve: PlaneCurve, n: int | None = None) -> int:
    if curve.polygon is not None:
        total = float(curve.polygon.exterior_angles().sum())
    else:
        total = _unwrapped_turning(curve, n or curve.samples_hint)
    rho = total / (2 * np.pi)
    if abs(rho - round(rho)) >= 0.1:
        raise SamplingError(f"rotation number residual {rho - round(rho):.3g} too large")
    return int(round(rho))


def global_invariants(curve: PlaneCurve, n: int | None = None) -> dict:
    """Length, signed area, rotation number of the velocity, convexity."""
    if not curve.closed:
        raise CurveError("global invariants need a closed curve")
    n = n or curve.samples_hint
    rho = rotation_number(curve, n)
    if curve.polygon is not None:
        v = curve.polygon.vertices
        x, y = v[:, 0], v[:, 1]
        area = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        turns = curve.polygon.exterior_angles()
        convex = bool(np.all(turns >= -1e-12) and rho == 1)
        return {"length": curve.polygon.length, "area": area, "rho": rho, "convex": convex}
    t = curve.grid(n, endpoint=False)
    p, v = curve.position(t), curve.d1(t)
    # trapezoid rule on a periodic integrand: spectrally accurate
    length = float(np.mean(np.hypot(v[:, 0], v[:, 1])) * curve.period)
    area = float(0.5 * np.mean(p[:, 0] * v[:, 1] - p[:, 1] * v[:, 0]) * curve.period)
    k = curvature(curve, t)
    eps = 1e-9 * float(np.max(np.abs(k)))
    convex = bool(np.all(k >= -eps) and rho == 1)
    return {"length": length, "area": area, "rho": rho, "convex": convex}
