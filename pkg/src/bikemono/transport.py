"""Bicycle transport b(t) in SL(2,R) along front tracks, and monodromy reports.

The transport solves b' = A(t) b, b(t0) = I, with the traceless connection
A = -(1/(2 ell)) [[X', Y'], [Y', -X']].  Smooth curves are stepped with the
midpoint Magnus scheme b_{k+1} = exp(h A(t_k + h/2)) b_k, which stays in SL2
exactly; the trace is Richardson-extrapolated over n and 2n steps.  Polygons
use the exact product of per-edge exponentials.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from bikemono.geom2d import CurveError, ImmersionError, PlaneCurve, PolygonPath, arclength_reparam, polygon_curve
from bikemono.moebius import (
    PARABOLIC_TOL,
    FixedDirection,
    MarginalClassificationError,
    MonodromyClass,
    Sl2Map,
    classify,
    cumulative_product,
    det_rounding,
    exp_traceless_batch,
    fixed_directions,
    ordered_product,
)

DEFAULT_STEPS = 2**14
MAX_STEPS = 2**20
TARGET_ERROR = 1e-8


def connection_matrix(d1, ell: float = 1.0) -> np.ndarray:
    """-(1/(2 ell)) [[X', Y'], [Y', -X']] for velocity d1 = (X', Y')."""
    if not ell > 0:
        raise ValueError("bike length must be positive")
    x, y = float(d1[0]), float(d1[1])
    return -0.5 / ell * np.array([[x, y], [y, -x]])


@dataclass(frozen=True)
class TransportResult:
    ts: np.ndarray  # sample parameters, monotone
    mats: np.ndarray  # b(ts[k]), shape (m, 2, 2)
    monodromy: Sl2Map  # b at the end of the parameter span
    ell: float
    steps: int
    error_estimate: float

    @property
    def samples(self) -> list[tuple[float, Sl2Map]]:
        return [(float(t), Sl2Map.from_array(m)) for t, m in zip(self.ts, self.mats)]

    def to_csv_rows(self):
        yield ("t", "m11", "m12", "m21", "m22")
        for t, m in zip(self.ts, self.mats):
            yield (repr(float(t)), *(repr(float(x)) for x in m.ravel()))


def _renormalize(m: np.ndarray) -> np.ndarray:
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    det = a * d - b * c
    keep = np.abs(det - 1) <= det_rounding(a, b, c, d)
    if np.any(~keep & ~(det > 0)):
        raise ValueError("transport left SL2: non-positive determinant")
    scale = np.where(keep, 1.0, np.sqrt(np.where(keep, 1.0, det)))
    return m / scale[..., None, None]


def _step_exponentials(vel: np.ndarray, h: float, ell: float) -> np.ndarray:
    c = -h / (2 * ell)
    return exp_traceless_batch(c * vel[:, 0], c * vel[:, 1], c * vel[:, 1])


class _VelocityCache:
    """Midpoint velocities of a curve per step count; reused across bike lengths."""

    def __init__(self, curve: PlaneCurve, t_span: tuple[float, float] | None = None):
        self.curve = curve
        self.t_span = t_span or curve.t_span
        self._store: dict[int, np.ndarray] = {}

    def h(self, n: int) -> float:
        return (self.t_span[1] - self.t_span[0]) / n

    def __call__(self, n: int) -> np.ndarray:
        if n not in self._store:
            t0 = self.t_span[0]
            h = self.h(n)
            tm = t0 + h * (np.arange(n) + 0.5)
            vel = self.curve.d1(tm)
            if not np.all(np.isfinite(vel)):
                raise ValueError(f"non-finite velocity on {self.curve.name}")
            speed = np.hypot(vel[:, 0], vel[:, 1])
            if np.any(speed <= 1e-14 * max(1.0, speed.max())):
                raise ImmersionError(f"velocity vanishes on {self.curve.name}")
            if len(self._store) > 4:
                self._store.pop(min(self._store))
            self._store[n] = vel
        return self._store[n]


def _smooth(cache: _VelocityCache, ell: float, steps: int, refine: bool, target: float,
            max_steps: int, keep_samples: bool) -> TransportResult:
    if steps < 64 or steps & (steps - 1):
        raise ValueError("steps must be a power of two >= 64")
    if not ell > 0:
        raise ValueError("bike length must be positive")
    n = steps
    e_n = _step_exponentials(cache(n), cache.h(n), ell)
    m_n = ordered_product(e_n)
    while True:
        e_2n = _step_exponentials(cache(2 * n), cache.h(2 * n), ell)
        m_2n = ordered_product(e_2n)
        err = abs(np.trace(m_n) - np.trace(m_2n))
        # relative to the trace scale: large hyperbolic traces are classified by a wide margin
        if not refine or err < target * max(1.0, abs(np.trace(m_2n))) or 2 * n >= max_steps:
            break
        n, e_n, m_n = 2 * n, e_2n, m_2n
    # midpoint Magnus is symmetric: error expansion in even powers of h
    extrap = _renormalize((4 * m_2n - m_n) / 3)
    if not np.all(np.isfinite(extrap)):
        raise ValueError("non-finite transport")
    t0, t1 = cache.t_span
    if keep_samples:
        p_n = cumulative_product(e_n)
        p_2n = cumulative_product(e_2n)[::2]
        mats = _renormalize((4 * p_2n - p_n) / 3)
        ts = np.linspace(t0, t1, n + 1)
    else:
        mats = np.stack([np.eye(2), extrap])
        ts = np.array([t0, t1])
    return TransportResult(ts, mats, Sl2Map.from_array(extrap), ell, n, float(err))


def transport_smooth(curve: PlaneCurve, ell: float = 1.0, steps: int = DEFAULT_STEPS, *,
                     refine: bool = True, target: float = TARGET_ERROR, max_steps: int = MAX_STEPS,
                     keep_samples: bool = False, t_span: tuple[float, float] | None = None) -> TransportResult:
    """Transport along a smooth curve by midpoint Magnus stepping with Richardson extrapolation.

    ``steps`` is doubled until |tr_n - tr_2n| < ``target`` * max(1, |tr|) (or ``max_steps``
    is reached) unless ``refine`` is False.  With ``keep_samples`` the result
    holds b(t) on the n-step grid, extrapolated the same way.
    """
    if curve.kind == "polygon" and t_span is None:
        return transport_polygon(curve.polygon, ell)
    return _smooth(_VelocityCache(curve, t_span), ell, steps, refine, target, max_steps, keep_samples)


def transport_polygon(path: PolygonPath | PlaneCurve, ell: float = 1.0, subdivide: int = 1) -> TransportResult:
    """Exact product of edge exponentials in traversal order.

    ``subdivide`` > 1 also returns b at equally spaced points inside each edge.
    """
    if isinstance(path, PlaneCurve):
        if path.polygon is None:
            raise CurveError("transport_polygon needs a polygon")
        path = path.polygon
    if not ell > 0:
        raise ValueError("bike length must be positive")
    e = path.edges
    lengths = path.edge_lengths
    if np.any(lengths <= 0):
        raise CurveError("degenerate edge")
    m = int(subdivide)
    c = -1.0 / (2 * ell * m)
    per_edge = exp_traceless_batch(c * e[:, 0], c * e[:, 1], c * e[:, 1])
    mats = np.repeat(per_edge, m, axis=0)
    knots = np.concatenate([[0.0], np.cumsum(lengths)])
    ts = np.concatenate([np.linspace(knots[k], knots[k + 1], m, endpoint=False) for k in range(len(lengths))])
    ts = np.append(ts, knots[-1])
    if m == 1:
        total = ordered_product(mats)
        cum = cumulative_product(mats)
    else:
        cum = cumulative_product(mats)
        total = cum[-1]
    return TransportResult(ts, cum, Sl2Map.from_array(total), ell, len(mats), 0.0)


def transport(curve: PlaneCurve, ell: float = 1.0, steps: int = DEFAULT_STEPS, **kw) -> TransportResult:
    if curve.kind == "polygon":
        return transport_polygon(curve.polygon, ell, subdivide=kw.get("subdivide", 1))
    kw.pop("subdivide", None)
    return transport_smooth(curve, ell, steps, **kw)


def polygonal_convergence(curve: PlaneCurve, ns, ell: float = 1.0, ref_steps: int = 2**16) -> dict:
    """Operator-norm errors of inscribed polygons (vertices equally spaced in arclength)."""
    if not curve.closed:
        raise CurveError("polygonal convergence needs a closed curve")
    ns = [int(n) for n in ns]
    if curve.kind == "polygon":
        ref = transport_polygon(curve.polygon, ell).monodromy.array
    else:
        ref = transport_smooth(curve, ell, ref_steps, refine=False).monodromy.array
        unit = arclength_reparam(curve, max(4096, curve.samples_hint))
    errors = []
    for n in ns:
        if curve.kind == "polygon":
            if n == len(curve.polygon.vertices):
                approx = curve
            else:
                approx = polygon_curve(curve.position(np.linspace(0, curve.period, n, endpoint=False)))
        else:
            approx = polygon_curve(unit.position(np.linspace(0, unit.period, n, endpoint=False)))
        diff = transport_polygon(approx.polygon, ell).monodromy.array - ref
        errors.append(float(np.linalg.norm(diff, 2)))
    errs = np.asarray(errors)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log(errs[:-1] / errs[1:]) / np.log(np.asarray(ns[1:]) / np.asarray(ns[:-1]))
    return {"ns": ns, "errors": errors, "orders": orders.tolist()}


@dataclass(frozen=True)
class MonodromyReport:
    matrix: Sl2Map
    trace: float
    cls: MonodromyClass
    fixed: list[FixedDirection]
    ell: float
    curve: str
    tol: float
    error_estimate: float
    steps: int
    notes: list[str] = field(default_factory=list)

    @property
    def kind(self):
        return self.cls.kind

    @property
    def margin(self) -> float:
        return self.cls.margin

    def to_json(self) -> dict:
        return {
            "curve": self.curve,
            "ell": self.ell,
            "matrix": self.matrix.to_json(),
            "trace": self.trace,
            "class": self.cls.kind.value,
            "margin": self.cls.margin,
            "tol": self.tol,
            "error_estimate": self.error_estimate,
            "steps": self.steps,
            "fixed": [{"theta": f.theta, "stability": f.stability, "eigenvalue": f.eigenvalue} for f in self.fixed],
            "notes": list(self.notes),
        }


def _report(res: TransportResult, label: str, tol: float) -> MonodromyReport:
    m = res.monodromy
    tol_used = max(tol, 10 * res.error_estimate)
    cls = classify(m, tol_used)
    notes = []
    try:
        fixed = fixed_directions(m, tol_used)
    except MarginalClassificationError as exc:
        fixed, notes = [], [str(exc)]
    return MonodromyReport(m, m.trace, cls, fixed, res.ell, label, tol_used, res.error_estimate, res.steps, notes)


class BikeLengthFamily:
    """Monodromies of one closed curve for many bike lengths, sharing velocity samples."""

    def __init__(self, curve: PlaneCurve, steps: int = DEFAULT_STEPS, tol: float = PARABOLIC_TOL,
                 target: float = TARGET_ERROR, max_steps: int = MAX_STEPS):
        if not curve.closed:
            raise CurveError("monodromy needs a closed curve")
        self.curve = curve
        self.steps, self.tol, self.target, self.max_steps = steps, tol, target, max_steps
        self._cache = None if curve.kind == "polygon" else _VelocityCache(curve)

    def transport(self, ell: float, keep_samples: bool = False) -> TransportResult:
        if self._cache is None:
            return transport_polygon(self.curve.polygon, ell)
        return _smooth(self._cache, ell, self.steps, True, self.target, self.max_steps, keep_samples)

    def __call__(self, ell: float) -> MonodromyReport:
        return _report(self.transport(ell), self.curve.label, self.tol)


def monodromy(curve: PlaneCurve, ell: float = 1.0, *, steps: int = DEFAULT_STEPS, tol: float = PARABOLIC_TOL,
              target: float = TARGET_ERROR, max_steps: int = MAX_STEPS, refine: bool = True) -> MonodromyReport:
    """Monodromy of a closed curve based at t0, classified at max(tol, 10 * error estimate)."""
    if not curve.closed:
        raise CurveError("monodromy needs a closed curve")
    if curve.kind == "polygon":
        res = transport_polygon(curve.polygon, ell)
    else:
        res = transport_smooth(curve, ell, steps, refine=refine, target=target, max_steps=max_steps)
    return _report(res, curve.label, tol)
