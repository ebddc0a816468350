"""Phase diagrams, bike-length sweeps, and batch checks of the theorems and conjectures.

Curves cross process boundaries as JSON specs (see ``geom2d.curve_spec_json``),
so every cell and every counterexample carries a reproduction record.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from bikemono.geom2d import (
    CurveError,
    PlaneCurve,
    curve_spec_json,
    ellipse,
    curvature,
    global_invariants,
    max_abs_curvature,
    parse_curve_spec,
    rectangle,
    support_curve,
)
from bikemono.moebius import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY,
    PARABOLIC,
    PARABOLIC_TOL,
    MarginalClassificationError,
    classify,
)
from bikemono.tracks import closed_back_tracks
from bikemono.transport import BikeLengthFamily, MonodromyReport, monodromy, transport_polygon

MARGINAL = "Parabolic?"


def default_threads() -> int:
    return max(1, int(os.environ.get("BIKEMONO_THREADS", "1")))


def pmap(fn, items, threads: int | None = None) -> list:
    """Order-preserving map, in worker processes when ``threads`` > 1."""
    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))


def parse_range(text) -> tuple[float, float, int]:
    """``"min:max:count"`` -> (min, max, count); tuples pass through."""
    if isinstance(text, str):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must look like min:max:count, got {text!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    else:
        lo, hi, n = text
        lo, hi, n = float(lo), float(hi), int(n)
    if n < 1 or not (lo <= hi) or (n > 1 and lo == hi):
        raise ValueError(f"bad range {lo}:{hi}:{n}")
    return lo, hi, n


def range_values(r) -> np.ndarray:
    lo, hi, n = parse_range(r)
    return np.linspace(lo, hi, n)


def cell_label(report: MonodromyReport, tol: float = PARABOLIC_TOL) -> str:
    """Class name, or ``"Parabolic?"`` when only the integrator error makes the cell parabolic."""
    kind = report.kind
    if kind in (PARABOLIC, IDENTITY) and abs(report.margin) > tol:
        return MARGINAL
    return kind.value


# --------------------------------------------------------------- phase grids


@dataclass
class PhaseGrid:
    kind: str  # "rectangle" | "ellipse"
    a_axis: tuple[str, float, float, int]
    b_axis: tuple[str, float, float, int]
    traces: np.ndarray  # (na, nb)
    classes: list  # nested lists of labels, [i][j]
    ell: float
    provenance: str  # "closed-form+numeric" | "numeric"
    closed_form: np.ndarray | None = None

    @property
    def a_values(self) -> np.ndarray:
        return np.linspace(*self.a_axis[1:])

    @property
    def b_values(self) -> np.ndarray:
        return np.linspace(*self.b_axis[1:])

    def counts(self) -> dict:
        out: dict[str, int] = {}
        for row in self.classes:
            for c in row:
                out[c] = out.get(c, 0) + 1
        return out

    def to_csv_rows(self):
        yield ("a", "b", "trace", "class")
        for i, a in enumerate(self.a_values):
            for j, b in enumerate(self.b_values):
                yield (repr(float(a)), repr(float(b)), repr(float(self.traces[i, j])), self.classes[i][j])

    @classmethod
    def from_csv_rows(cls, rows, kind: str, ell: float = 1.0, provenance: str = "numeric") -> "PhaseGrid":
        rows = list(rows)
        if tuple(rows[0]) != ("a", "b", "trace", "class"):
            raise ValueError("not a phase grid CSV")
        a = sorted({float(r[0]) for r in rows[1:]})
        b = sorted({float(r[1]) for r in rows[1:]})
        traces = np.empty((len(a), len(b)))
        classes = [[""] * len(b) for _ in a]
        ia = {v: k for k, v in enumerate(a)}
        ib = {v: k for k, v in enumerate(b)}
        for r in rows[1:]:
            i, j = ia[float(r[0])], ib[float(r[1])]
            traces[i, j] = float(r[2])
            classes[i][j] = r[3]
        return cls(kind, ("a", a[0], a[-1], len(a)), ("b", b[0], b[-1], len(b)), traces, classes, ell, provenance)


def rectangle_trace(a, b):
    """tr b(R_{a,b}) = 2 - (cosh a - 1)(cosh b - 1) = 2 - 4 sinh^2(a/2) sinh^2(b/2)."""
    return 2 - (np.cosh(a) - 1) * (np.cosh(b) - 1)


def _rect_cell(ab):
    m = transport_polygon(rectangle(*ab).polygon).monodromy
    return m.trace, classify(m, PARABOLIC_TOL).kind.value


def scan_rectangles(a_range, b_range=None, n: int | None = None, threads: int | None = None) -> PhaseGrid:
    """Rectangle phase diagram: exact polygon transport next to the closed form.

    Ranges are ``(min, max, count)`` or ``"min:max:count"``; ``n`` overrides both counts.
    """
    b_range = a_range if b_range is None else b_range
    a_lo, a_hi, na = parse_range(a_range)
    b_lo, b_hi, nb = parse_range(b_range)
    if n is not None:
        na = nb = int(n)
    if a_lo <= 0 or b_lo <= 0:
        raise ValueError("rectangle sides must be positive")
    av, bv = np.linspace(a_lo, a_hi, na), np.linspace(b_lo, b_hi, nb)
    cells = pmap(_rect_cell, [(a, b) for a in av for b in bv], threads)
    traces = np.array([c[0] for c in cells]).reshape(na, nb)
    classes = [[cells[i * nb + j][1] for j in range(nb)] for i in range(na)]
    closed = rectangle_trace(av[:, None], bv[None, :])
    return PhaseGrid("rectangle", ("a", a_lo, a_hi, na), ("b", b_lo, b_hi, nb), traces, classes, 1.0,
                     "closed-form+numeric", closed)


def _ellipse_cell(args):
    a, b, ell, tol = args
    rep = monodromy(ellipse(a, b), ell, tol=tol)
    return rep.trace, cell_label(rep, tol)


def scan_ellipses(a_range, b_range=None, n: int | None = None, ell: float = 1.0, tol: float = PARABOLIC_TOL,
                  threads: int | None = None) -> PhaseGrid:
    """Ellipse phase diagram by numerical transport (semi-axes a, b)."""
    b_range = a_range if b_range is None else b_range
    a_lo, a_hi, na = parse_range(a_range)
    b_lo, b_hi, nb = parse_range(b_range)
    if n is not None:
        na = nb = int(n)
    if a_lo <= 0 or b_lo <= 0:
        raise ValueError("semi-axes must be positive")
    av, bv = np.linspace(a_lo, a_hi, na), np.linspace(b_lo, b_hi, nb)
    cells = pmap(_ellipse_cell, [(a, b, ell, tol) for a in av for b in bv], threads)
    traces = np.array([c[0] for c in cells]).reshape(na, nb)
    classes = [[cells[i * nb + j][1] for j in range(nb)] for i in range(na)]
    return PhaseGrid("ellipse", ("a", a_lo, a_hi, na), ("b", b_lo, b_hi, nb), traces, classes, ell, "numeric")


def rectangle_extremes(level: float = 1.0) -> dict:
    """Extremal area and perimeter of rectangles on sinh(a/2) sinh(b/2) = level.

    ``level = 1`` is where the trace is -2.  Computed numerically; the closed
    forms are not assumed.
    """
    def b_of(a):
        return 2 * math.asinh(level / math.sinh(a / 2))

    lo, hi = 1e-3, 40.0
    area = minimize_scalar(lambda a: -a * b_of(a), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    per = minimize_scalar(lambda a: 2 * (a + b_of(a)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return {
        "level": level,
        "max_area": float(-area.fun),
        "max_area_at": (float(area.x), b_of(area.x)),
        "min_perimeter": float(per.fun),
        "min_perimeter_at": (float(per.x), b_of(per.x)),
    }


# --------------------------------------------------------------- ell sweeps


@dataclass
class SweepResult:
    curve: dict
    ells: np.ndarray
    traces: np.ndarray
    classes: list
    margins: np.ndarray
    rho: list
    mu: list
    transitions: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_csv_rows(self):
        yield ("ell", "trace", "class", "rho", "mu")
        for k, ell in enumerate(self.ells):
            rho = "" if self.rho[k] is None else str(self.rho[k])
            mu = "" if self.mu[k] is None else str(self.mu[k])
            yield (repr(float(ell)), repr(float(self.traces[k])), self.classes[k], rho, mu)

    def to_json(self) -> dict:
        return {
            "curve": self.curve,
            "cells": [
                {"ell": float(e), "trace": float(t), "class": c, "margin": float(m), "rho": r, "mu": u}
                for e, t, c, m, r, u in zip(self.ells, self.traces, self.classes, self.margins, self.rho, self.mu)
            ],
            "transitions": self.transitions,
            "notes": self.notes,
        }


def _g(family: BikeLengthFamily, ell: float) -> float:
    return abs(family.transport(ell).monodromy.trace) - 2.0


def _bisect(family, lo, hi, g_lo, g_hi, tol):
    monotone = True
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = _g(family, mid)
        if not (min(g_lo, g_hi) <= g_mid <= max(g_lo, g_hi)):
            monotone = False
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    return lo, hi, g_lo, g_hi, monotone


def _touch(family, lo, hi, tol):
    # |tr| - 2 touches zero without changing sign: locate the extremum
    res = minimize_scalar(lambda x: abs(_g(family, x)), bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return float(res.x), float(_g(family, res.x))


def _track_data(curve, ell, report):
    try:
        tracks = closed_back_tracks(curve, ell, report)
    except (MarginalClassificationError, CurveError) as exc:
        return None, None, str(exc)
    if not tracks:
        return None, None, None
    bt = tracks[0]
    rhos = {t.rho for t in tracks}
    note = None
    if len(rhos) > 1:
        note = f"back tracks at ell={ell:g} have different rotation numbers {sorted(rhos, key=str)}"
    return bt.rho, (bt.mu if bt.mu_reliable else None), note


def sweep_bike_length(curve: PlaneCurve | str | dict, ell_min: float, ell_max: float, n: int,
                      bisection_tol: float = 1e-9, steps: int = 2**14, max_steps: int = 2**16,
                      tol: float = PARABOLIC_TOL, tracks: bool = True) -> SweepResult:
    """Classify the monodromy on an ell grid and refine every class change by bisection on |tr| - 2.

    Cells use step doubling up to ``max_steps``; bisection uses the Richardson
    trace at the converged step count (its error is far below |tr_n - tr_2n|).
    """
    curve = parse_curve_spec(curve)
    if not 0 < ell_min < ell_max:
        raise ValueError("need 0 < ell_min < ell_max")
    family = BikeLengthFamily(curve, steps=steps, tol=tol, max_steps=max_steps)
    ells = np.linspace(ell_min, ell_max, n)
    reports = [family(e) for e in ells]
    traces = np.array([r.trace for r in reports])
    margins = np.array([r.margin for r in reports])
    classes = [cell_label(r, tol) for r in reports]
    rho, mu, notes = [], [], []
    for e, r in zip(ells, reports):
        if tracks and r.kind in (HYPERBOLIC, PARABOLIC):
            a, b, note = _track_data(curve, e, r)
            if note:
                notes.append(note)
        else:
            a, b = None, None
        rho.append(a)
        mu.append(b)

    bis = BikeLengthFamily(curve, steps=max(steps, max(r.steps for r in reports)), tol=tol)
    bis.max_steps = bis.steps * 2
    bis.target = math.inf
    decisive = [k for k, c in enumerate(classes) if c in (ELLIPTIC.value, HYPERBOLIC.value)]
    transitions = []
    for i, j in zip(decisive, decisive[1:]):
        ci, cj = classes[i], classes[j]
        if ci != cj:
            lo, hi, g_lo, g_hi, monotone = _bisect(bis, ells[i], ells[j], margins[i], margins[j], bisection_tol)
            star = 0.5 * (lo + hi)
            transitions.append({"ell": star, "bracket": [float(lo), float(hi)], "from": ci, "to": cj,
                                "g": _g(bis, star), "kind": "crossing",
                                "confidence": "full" if monotone else "reduced"})
        elif j - i > 1:
            star, g = _touch(bis, ells[i], ells[j], bisection_tol)
            transitions.append({"ell": star, "bracket": [float(ells[i]), float(ells[j])], "from": ci, "to": cj,
                                "g": g, "kind": "touch", "confidence": "reduced"})
    return SweepResult(curve_spec_json(curve), ells, traces, classes, margins, rho, mu, transitions, notes)


# --------------------------------------------------------------- corpora


def random_convex_curve(rng: np.random.Generator, r0_range=(0.6, 2.0), modes: int = 4, slack: float = 0.8) -> PlaneCurve:
    """Strictly convex support-function curve with random low modes."""
    r0 = float(rng.uniform(*r0_range))
    k = np.arange(2, modes + 2)
    raw_a = rng.normal(size=modes) / k**2
    raw_b = rng.normal(size=modes) / k**2
    budget = float(np.sum((k**2 - 1) * (np.abs(raw_a) + np.abs(raw_b))))
    amp = slack * rng.uniform(0.05, 1.0) * r0 / budget
    return support_curve(r0, (amp * raw_a).round(12).tolist(), (amp * raw_b).round(12).tolist())


def convex_corpus(n: int, seed: int = 0, r0_range=(0.6, 2.0), modes: int = 4) -> list[PlaneCurve]:
    rng = np.random.default_rng(seed)
    return [random_convex_curve(rng, r0_range, modes) for _ in range(n)]


def low_curvature_corpus(n: int, seed: int = 0) -> list[PlaneCurve]:
    """Closed curves with max |kappa| <= 1 and kappa not constant: ellipses with b^2 >= a >= b, and
    support curves whose radius of curvature stays >= 1."""
    rng = np.random.default_rng(seed)
    out = []
    n_ell = n // 4
    while len(out) < n_ell:
        b = float(rng.uniform(1.05, 4.0))
        a = float(rng.uniform(b * 1.001, min(b * b, 6.0)))
        out.append(ellipse(a, b))
    while len(out) < n:
        c = random_convex_curve(rng, (1.1, 3.0))
        r0 = c.params["r0"]
        k = np.arange(2, len(c.params["a"]) + 2)
        bound = float(np.sum((k**2 - 1) * (np.abs(c.params["a"]) + np.abs(c.params["b"]))))
        if r0 - bound >= 1.0 and bound > 0:
            out.append(c)
    return out


# --------------------------------------------------------------- harnesses


def _classify_spec(args):
    spec, ell, tol = args
    curve = parse_curve_spec(spec)
    rep = monodromy(curve, ell, tol=tol)
    inv = global_invariants(curve)
    kmax = max_abs_curvature(curve)
    return {"curve": spec, "ell": ell, "trace": rep.trace, "class": cell_label(rep, tol), "margin": rep.margin,
            "error_estimate": rep.error_estimate, "steps": rep.steps, "length": inv["length"],
            "area": abs(inv["area"]), "convex": inv["convex"], "max_kappa": kmax}


def _scaling_spec(args):
    spec, scales, tol = args
    family = BikeLengthFamily(parse_curve_spec(spec), tol=tol)
    # monodromy of c * curve at ell = 1 equals that of curve at ell = 1 / c
    labels = [cell_label(family(1.0 / c), tol) for c in scales]
    return {"curve": spec, "scales": list(scales), "classes": labels}


def theorem_suites(corpus=None, low_curvature=None, tol: float = PARABOLIC_TOL, threads: int | None = None,
                   scales=None, seed: int = 0, n_convex: int = 500, n_low: int = 100) -> dict:
    """Falsifiable checks of the sufficient and necessary conditions for hyperbolicity.

    T2: max |kappa| <= 1 (not constant 1) -> Hyperbolic.  T3: convex and
    Hyperbolic -> L > 2 pi.  Menzin (convex): area > pi -> Hyperbolic.
    Cor: c * curve is Hyperbolic for all c >= c0.  Marginal cells are excluded
    and counted; every violation carries the curve spec and cell data.
    """
    corpus = convex_corpus(n_convex, seed) if corpus is None else corpus
    low = low_curvature_corpus(n_low, seed + 1) if low_curvature is None else low_curvature
    specs = [curve_spec_json(c) for c in corpus]
    low_specs = [curve_spec_json(c) for c in low]
    cells = pmap(_classify_spec, [(s, 1.0, tol) for s in specs], threads)
    low_cells = pmap(_classify_spec, [(s, 1.0, tol) for s in low_specs], threads)
    report = {}

    t2 = {"checked": 0, "excluded": 0, "marginal": 0, "violations": []}
    for c in low_cells:
        if c["max_kappa"] > 1 + 1e-12:
            t2["excluded"] += 1
            continue
        if c["class"] == MARGINAL:
            t2["marginal"] += 1
            continue
        t2["checked"] += 1
        if c["class"] != HYPERBOLIC.value:
            t2["violations"].append(c)
    report["T2"] = t2

    t3 = {"checked": 0, "hyperbolic": 0, "excluded": 0, "marginal": 0, "violations": []}
    menzin = {"checked": 0, "excluded": 0, "marginal": 0, "violations": []}
    for c in cells:
        if not c["convex"]:
            t3["excluded"] += 1
            menzin["excluded"] += 1
            continue
        if c["class"] == MARGINAL:
            t3["marginal"] += 1
            menzin["marginal"] += 1
            continue
        t3["checked"] += 1
        if c["class"] == HYPERBOLIC.value:
            t3["hyperbolic"] += 1
            if not c["length"] > 2 * math.pi:
                t3["violations"].append(c)
        if c["area"] > math.pi:
            menzin["checked"] += 1
            if c["class"] != HYPERBOLIC.value:
                menzin["violations"].append(c)
    report["T3"] = t3
    report["Menzin"] = menzin

    scales = np.geomspace(0.25, 16, 13) if scales is None else np.asarray(scales)
    cor_specs = specs[: min(len(specs), 20)]
    rows = pmap(_scaling_spec, [(s, tuple(float(x) for x in scales), tol) for s in cor_specs], threads)
    cor = {"checked": 0, "violations": [], "c0": []}
    for row in rows:
        cor["checked"] += 1
        labels = row["classes"]
        hyp = [lab == HYPERBOLIC.value for lab in labels]
        if not hyp[-1]:
            cor["violations"].append({**row, "reason": "largest scale not hyperbolic"})
            cor["c0"].append(None)
            continue
        k = len(hyp) - 1
        while k > 0 and hyp[k - 1]:
            k -= 1
        cor["c0"].append(float(scales[k]))
    report["Corollary"] = cor
    report["ok"] = not any(report[key]["violations"] for key in ("T2", "T3", "Menzin", "Corollary"))
    return report


def _conjecture_curve(args):
    spec, ells, tol = args
    curve = parse_curve_spec(spec)
    family = BikeLengthFamily(curve, tol=tol)
    cells = []
    for ell in ells:
        rep = family(ell)
        label = cell_label(rep, tol)
        rho = mu = None
        degenerate = False
        if rep.kind in (HYPERBOLIC, PARABOLIC) and label != MARGINAL:
            try:
                tracks = closed_back_tracks(curve, ell, rep)
                rho = tracks[0].rho
                mu = tracks[0].mu if tracks[0].mu_reliable else None
                degenerate = not all(t.mu_reliable for t in tracks)
                rhos = [t.rho for t in tracks]
            except (MarginalClassificationError, CurveError):
                degenerate, rhos = True, []
        else:
            rhos = []
        cells.append({"ell": float(ell), "trace": rep.trace, "class": label, "margin": rep.margin,
                      "rho": rho, "rhos": rhos, "mu": mu, "degenerate": degenerate,
                      "error_estimate": rep.error_estimate})
    return cells


def conjecture_harness(corpus=None, ells=(0.1, 3.0, 30), tol: float = PARABOLIC_TOL, threads: int | None = None,
                       seed: int = 0, n: int = 50) -> dict:
    """Per strictly convex curve: C2 (a single Hyperbolic -> Elliptic switch along ell) and
    C1 (rho = 1 on every hyperbolic or parabolic cell).  Counterexamples are dumped, never fixed."""
    corpus = convex_corpus(n, seed) if corpus is None else corpus
    ell_values = range_values(ells) if not isinstance(ells, np.ndarray) else ells
    accepted, rejected = [], []
    for c in corpus:
        if global_invariants(c)["convex"] and _strictly_convex(c):
            accepted.append(curve_spec_json(c))
        else:
            rejected.append(curve_spec_json(c))
    rows = pmap(_conjecture_curve, [(s, tuple(float(e) for e in ell_values), tol) for s in accepted], threads)
    out = {"curves": len(accepted), "rejected": rejected, "C1": [], "C2": [], "excluded_cells": 0,
           "ell_grid": [float(e) for e in ell_values], "seed": seed, "ell0": []}
    for spec, cells in zip(accepted, rows):
        labels = [c["class"] for c in cells]
        out["excluded_cells"] += sum(1 for c in cells if c["class"] == MARGINAL or c["degenerate"])
        decisive = [lab for lab in labels if lab in (HYPERBOLIC.value, ELLIPTIC.value)]
        switches = sum(1 for x, y in zip(decisive, decisive[1:]) if x != y)
        ok_c2 = switches == 1 and decisive[0] == HYPERBOLIC.value and decisive[-1] == ELLIPTIC.value
        if not ok_c2:
            out["C2"].append({"curve": spec, "cells": cells, "reason": f"{switches} class switches"})
            out["ell0"].append(None)
        else:
            last_h = max(k for k, lab in enumerate(labels) if lab == HYPERBOLIC.value)
            out["ell0"].append([cells[last_h]["ell"], cells[last_h + 1]["ell"]])
        bad = [c for c in cells if not c["degenerate"] and c["rhos"] and any(r != 1 for r in c["rhos"])]
        if bad:
            out["C1"].append({"curve": spec, "cells": bad, "reason": "rho(rear) != 1"})
    out["counterexamples"] = len(out["C1"]) + len(out["C2"])
    return out


def _strictly_convex(curve: PlaneCurve, n: int = 4096) -> bool:
    k = curvature(curve, curve.grid(n, endpoint=False))
    return bool(np.all(k > 0) or np.all(k < 0))


def find_ell0(curve, lo: float = 1e-2, hi: float = 1e2, tol: float = 1e-10) -> float:
    """ell at which |tr| - 2 changes sign, assuming a single switch in [lo, hi]."""
    family = BikeLengthFamily(parse_curve_spec(curve), target=math.inf, max_steps=2**15)
    return float(brentq(lambda e: _g(family, e), lo, hi, xtol=tol))


def circle_trace(radius: float, ell: float = 1.0) -> float:
    """Trace for a circle traversed once: -2 cosh(pi sqrt(x^2 - 1)) with x = R / ell (cos branch for x < 1)."""
    x = radius / ell
    if x >= 1:
        return -2 * math.cosh(math.pi * math.sqrt(x * x - 1))
    return -2 * math.cos(math.pi * math.sqrt(1 - x * x))


def invariant_suites() -> dict:
    """Fast self-checks run by ``verify`` next to the theorem suites."""
    from bikemono.geom2d import circle, fish_front
    from bikemono.tracks import rot_identity_check

    out = {}
    rep = monodromy(circle(1.0), 1.0)
    out["unit_circle_parabolic"] = {"ok": rep.kind == PARABOLIC, "trace": rep.trace}
    errs = []
    for r in (0.3, 0.7, 1.5, 2.5):
        t = monodromy(circle(r), 1.0).trace
        errs.append(abs(t - circle_trace(r)) / max(1.0, abs(t)))
    out["circle_oracle"] = {"ok": max(errs) < 1e-8, "max_rel_error": max(errs)}
    g = scan_rectangles((0.2, 4.0, 10))
    err = float(np.max(np.abs(g.traces - g.closed_form)))
    out["rectangle_closed_form"] = {"ok": err < 1e-10, "max_error": err}
    t1 = monodromy(ellipse(2.0, 1.0), 2.0).trace
    t2 = monodromy(ellipse(1.0, 0.5), 1.0).trace
    out["scaling"] = {"ok": abs(t1 - t2) < 1e-10, "difference": t1 - t2}
    res = []
    front = fish_front()
    for ell in (0.5, 1.0, 2.0):
        for bt in closed_back_tracks(front, ell):
            res.append(rot_identity_check(front, bt))
    out["rotation_identity_fish"] = {"ok": all(r == 0 for r in res), "residuals": res}
    out["ok"] = all(v["ok"] for v in out.values())
    return out
