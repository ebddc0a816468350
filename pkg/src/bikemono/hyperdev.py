"""Hyperbolic developments z(t) = b(t)^{-1} . i in the upper half-plane.

Orientation convention: the development produced here has geodesic curvature
equal to MINUS the Euclidean curvature of the source (the half-plane carries
its standard orientation).  Nothing downstream re-reflects it; distances,
self-intersections and traces are reflection invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely

from bikemono.geom2d import CurveError, PlaneCurve, arclength_reparam, curvature
from bikemono.moebius import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY,
    Sl2Map,
    cayley,
    classify,
    fixed_directions,
    hyp_distance,
    moebius_half_plane,
)
from bikemono.transport import transport_polygon, transport_smooth

MIN_CHECK_SAMPLES = 2**12


class InconclusiveIntersection(RuntimeError):
    """Nearest approach lies between delta and 10 delta: refine the sampling and retry."""

    def __init__(self, separation: float, delta: float, witness):
        super().__init__(f"nearest approach {separation:.3g} within (delta, 10 delta), delta={delta:.3g}")
        self.separation, self.delta, self.witness = separation, delta, witness


@dataclass(frozen=True)
class Development:
    ts: np.ndarray
    z: np.ndarray  # complex, upper half-plane
    period_map: Sl2Map | None
    source: str
    ell: float
    curve: PlaneCurve  # unit-speed source the samples refer to

    @property
    def x(self) -> np.ndarray:
        return self.z.real

    @property
    def y(self) -> np.ndarray:
        return self.z.imag

    def disk(self) -> np.ndarray:
        return cayley(self.z)


def _apply_inverse(mats: np.ndarray, z: complex = 1j) -> np.ndarray:
    # [[a, b], [c, d]]^{-1} = [[d, -b], [-c, a]]
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    return (d * z - b) / (-c * z + a)


def develop(curve: PlaneCurve, ell: float = 1.0, steps: int = 2**13, subdivide: int = 64) -> Development:
    """Sample z(t) = b(t)^{-1} . i; for polygons each edge is split into ``subdivide`` exact pieces."""
    if curve.kind == "polygon":
        res = transport_polygon(curve.polygon, ell, subdivide=subdivide)
        src = curve
    else:
        src = curve if curve.params.get("arclength") else arclength_reparam(curve, max(steps, curve.samples_hint))
        res = transport_smooth(src, ell, steps, refine=False, keep_samples=True)
    z = _apply_inverse(res.mats)
    z[0] = 1j
    period = res.monodromy.inverse() if curve.closed else None
    return Development(res.ts, z, period, curve.label, ell, src)


def _fd_derivatives(f: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order central first and second differences at samples 2..n-3."""
    d1 = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d2 = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    return d1, d2


def hyperbolic_speed(dev: Development) -> np.ndarray:
    """|z'| / Im z at interior samples, per unit of Euclidean arclength."""
    h = dev.ts[1] - dev.ts[0]
    dz, _ = _fd_derivatives(dev.z, h)
    return np.abs(dz) / dev.y[2:-2]


def curvature_transfer_check(dev: Development) -> float:
    """sup |kappa_dev + ell * kappa_source| over interior samples (finite differences)."""
    if len(dev.ts) < MIN_CHECK_SAMPLES:
        raise ValueError(f"need at least {MIN_CHECK_SAMPLES} samples, got {len(dev.ts)}")
    if dev.curve.kind == "polygon":
        raise CurveError("curvature transfer is checked on smooth sources only")
    h = dev.ts[1] - dev.ts[0]
    dz, ddz = _fd_derivatives(dev.z, h)
    # derivatives with respect to hyperbolic arclength u = t / ell
    dz, ddz = dev.ell * dz, dev.ell**2 * ddz
    x1, y1, x2, y2 = dz.real, dz.imag, ddz.real, ddz.imag
    y = dev.y[2:-2]
    k_dev = (x1 * y2 - y1 * x2) / y**2 + x1 / y
    k_src = curvature(dev.curve, dev.ts[2:-2])
    return float(np.max(np.abs(k_dev + dev.ell * k_src)))


def chord_pair(arc: PlaneCurve, ell: float = 1.0, steps: int = 2**12) -> dict:
    """Euclidean chord of an open arc and the hyperbolic chord of its development."""
    p0, p1 = arc.position(arc.t_span[0]), arc.position(arc.t_span[1])
    d = float(np.hypot(*(p1 - p0)))
    if arc.kind == "polygon":
        end = transport_polygon(arc.polygon, ell).monodromy
    else:
        end = transport_smooth(arc, ell, steps).monodromy
    d_tilde = hyp_distance(1j, moebius_half_plane(end.inverse(), 1j))
    return {"d": d, "d_tilde": float(d_tilde)}


@dataclass(frozen=True)
class IntersectionResult:
    hit: bool
    witness: tuple[float, float] | None
    min_separation: float
    delta: float
    segments: int


def _chart(dev: Development, window: int) -> tuple[np.ndarray, np.ndarray, str]:
    """Samples over ``window`` periods in coordinates where the period map is rigid.

    Powers of a hyperbolic period map push samples exponentially close to the
    ideal boundary, beyond double precision in the disk model.  The period map
    is conjugated to a normal form once, and copies are generated in that form:
    hyperbolic -> (log|w|, arg w) with h a translation in log|w|; elliptic ->
    Poincare disk centered at the fixed point with h a rotation; parabolic ->
    half-plane with h a horizontal translation.
    """
    if dev.period_map is None:
        raise CurveError("self-intersection over periods needs a closed source")
    L = dev.ts[-1] - dev.ts[0]
    base_t = dev.ts if window == 1 else dev.ts[:-1]
    base_z = dev.z if window == 1 else dev.z[:-1]
    h = dev.period_map
    cls = classify(h)
    ks = np.arange(window)
    ts = (base_t[None, :] + L * ks[:, None]).ravel()
    if window > 1:
        ts = np.append(ts, dev.ts[0] + window * L)
    if cls == HYPERBOLIC:
        lam = fixed_directions(h)[0].eigenvalue
        M = h.array
        vecs = []
        for mu in (lam, 1 / lam):
            N = M - mu * np.eye(2)
            row = N[np.argmax(np.abs(N).sum(axis=1))]
            vecs.append(np.array([-row[1], row[0]]))
        P = np.column_stack(vecs)
        if np.linalg.det(P) < 0:
            P[:, 1] *= -1
        w = moebius_half_plane(Sl2Map.from_array(P).inverse(), base_z)
        shift = math.log(lam * lam)
        u = np.log(np.abs(w))[None, :] + shift * ks[:, None]
        v = np.broadcast_to(np.angle(w)[None, :], u.shape)
        pts = np.stack([u.ravel(), v.ravel()], axis=1)
        if window > 1:
            pts = np.vstack([pts, [np.log(abs(w[0])) + shift * window, np.angle(w[0])]])
        return ts, pts, "axis"
    if cls == ELLIPTIC:
        a, b, c, d = h.m11, h.m12, h.m21, h.m22
        root = math.sqrt(max(4 - h.trace**2, 0.0))
        zstar = complex(a - d, root) / (2 * c)
        if zstar.imag < 0:
            zstar = zstar.conjugate()
        rot = 1 / (c * zstar + d) ** 2
        rot /= abs(rot)
        zeta = (base_z - zstar) / (base_z - zstar.conjugate())
        copies = (rot ** ks)[:, None] * zeta[None, :]
        pts = copies.ravel()
        if window > 1:
            pts = np.append(pts, rot**window * zeta[0])
        return ts, np.stack([pts.real, pts.imag], axis=1), "disk"
    if cls == IDENTITY:
        w = cayley(base_z)
        pts = np.tile(w, window)
        if window > 1:
            pts = np.append(pts, w[0])
        return ts, np.stack([pts.real, pts.imag], axis=1), "disk"
    a, c, d = h.m11, h.m21, h.m22
    g = Sl2Map(0.0, -1.0, 1.0, -(a - d) / (2 * c)) if abs(c) > 1e-300 else Sl2Map.identity()
    w = moebius_half_plane(g, base_z)
    tau = moebius_half_plane(g, moebius_half_plane(h, base_z[0])) - w[0]
    copies = w[None, :] + tau.real * ks[:, None]
    pts = copies.ravel()
    if window > 1:
        pts = np.append(pts, w[0] + tau.real * window)
    return ts, np.stack([pts.real, pts.imag], axis=1), "half-plane"


def self_intersects(dev: Development, window: int = 1, delta: float | None = None, min_gap: int = 8) -> IntersectionResult:
    """Search the development, extended over ``window`` periods, for self-crossings.

    Non-adjacent polyline segments closer than ``delta`` count as a hit.  Periods
    are generated in a normal-form chart of the period map (see :func:`_chart`).  If no hit
    is found but the nearest approach (among segments at least ``min_gap`` apart)
    lies in (delta, 10 delta), :class:`InconclusiveIntersection` is raised.
    Candidate pairs come from an STR-tree, which copes with the exponential
    crowding of samples near the ideal boundary.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    ts, coords, _ = _chart(dev, int(window))
    if delta is None:
        delta = 1e-6 * float(np.max(np.ptp(coords, axis=0)))
    segs = shapely.linestrings(np.stack([coords[:-1], coords[1:]], axis=1))
    n = len(segs)
    tree = shapely.STRtree(segs)
    i, j = tree.query(segs, predicate="dwithin", distance=10 * delta)
    keep = j - i >= 2
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return IntersectionResult(False, None, math.inf, delta, n)
    dist = shapely.distance(segs[i], segs[j])
    hits = np.flatnonzero(dist < delta)
    if len(hits):
        first = hits[np.lexsort((j[hits], i[hits]))[0]]
        return IntersectionResult(True, (float(ts[i[first]]), float(ts[j[first]])), float(dist[hits].min()), delta, n)
    far = j - i >= min_gap
    if np.any(far):
        k = int(np.argmin(np.where(far, dist, np.inf)))
        raise InconclusiveIntersection(float(dist[k]), delta, (float(ts[i[k]]), float(ts[j[k]])))
    return IntersectionResult(False, None, math.inf, delta, n)
