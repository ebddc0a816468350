"""Rear tracks from fixed points of the monodromy; rotation number, cusps and Maslov index.

The rear wheel sits at gamma = Gamma + ell (cos theta, sin theta) and theta obeys
the no-skid law ell theta' = X' sin theta - Y' cos theta.  In the moving frame
(r, i r) the front velocity is Gamma' = s r - ell theta' i r with s = Gamma' . r
the rear speed, so the front turns once more than the frame for every full
turn of the loop (s, -ell theta').  Each such turn is made of two cusps, hence
mu = 2 * winding(s, -ell theta') and rho(front) = rho(rear) + mu / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from bikemono.geom2d import CurveError, PlaneCurve, curvature, curve_length, rotation_number
from bikemono.moebius import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY,
    PARABOLIC_TOL,
    MarginalClassificationError,
    circle_action,
)
from bikemono.transport import MonodromyReport, monodromy, transport_polygon

DEFAULT_TRACK_STEPS = 2**14
CLOSURE_TOL = 1e-6
DEGENERATE_CUSP = 1e-6
# orientation of the loop (s, MASLOV_FRAMING * ell theta'); frozen so the fish front at ell = 1 has mu = +2
MASLOV_FRAMING = -1.0


class DegenerateCuspError(ValueError):
    """A zero of the rear speed is tangential, so the Maslov index is not reliable."""


@numba.njit(cache=True)
def _rk4(vx, vy, h, ell, theta0):
    # vx, vy sampled at t_0, t_0 + h/2, t_1, ... (2n + 1 nodes)
    n = (vx.shape[0] - 1) // 2
    out = np.empty((theta0.shape[0], n + 1))
    for j in range(theta0.shape[0]):
        th = theta0[j]
        out[j, 0] = th
        for k in range(n):
            i = 2 * k
            k1 = (vx[i] * math.sin(th) - vy[i] * math.cos(th)) / ell
            u = th + 0.5 * h * k1
            k2 = (vx[i + 1] * math.sin(u) - vy[i + 1] * math.cos(u)) / ell
            u = th + 0.5 * h * k2
            k3 = (vx[i + 1] * math.sin(u) - vy[i + 1] * math.cos(u)) / ell
            u = th + h * k3
            k4 = (vx[i + 2] * math.sin(u) - vy[i + 2] * math.cos(u)) / ell
            th = th + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
            out[j, k + 1] = th
    return out


def theta_flow(curve: PlaneCurve, ell: float, theta0, steps: int = DEFAULT_TRACK_STEPS, *,
               backward: bool = False, t_span: tuple[float, float] | None = None):
    """Integrate the no-skid law by RK4 on ``steps`` equal parameter steps.

    Returns ``(ts, theta)``; theta has one row per initial angle (or is 1-D for a
    scalar ``theta0``) and is unwrapped.  With ``backward`` the value ``theta0``
    is imposed at the end of the span and the flow runs in reverse.  Polygons
    use the exact Moebius action of the per-edge transports instead.
    """
    if not ell > 0:
        raise ValueError("bike length must be positive")
    scalar = np.ndim(theta0) == 0
    th0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    if curve.kind == "polygon":
        if backward or t_span is not None:
            raise CurveError("polygon theta flow runs forward over the whole path")
        res = transport_polygon(curve.polygon, ell, subdivide=max(1, steps // len(curve.polygon.edges)))
        ts = res.ts
        theta = np.array([_lift(circle_action(res.mats, th), th) for th in th0])
        return ts, theta[0] if scalar else theta
    t0, t1 = t_span or curve.t_span
    nodes = np.linspace(t0, t1, 2 * steps + 1)
    v = curve.d1(nodes)
    h = (t1 - t0) / steps
    if backward:
        theta = _rk4(v[::-1, 0].copy(), v[::-1, 1].copy(), -h, float(ell), th0)[:, ::-1]
    else:
        theta = _rk4(np.ascontiguousarray(v[:, 0]), np.ascontiguousarray(v[:, 1]), h, float(ell), th0)
    ts = nodes[::2]
    return ts, theta[0] if scalar else theta


def _lift(raw: np.ndarray, start: float) -> np.ndarray:
    steps = (np.diff(raw) + np.pi) % (2 * np.pi) - np.pi
    first = start + ((raw[0] - start + np.pi) % (2 * np.pi) - np.pi)
    return np.concatenate([[first], first + np.cumsum(steps)])


def theta_rate(curve: PlaneCurve, ell: float, t, theta):
    """theta' from the no-skid law."""
    v = curve.d1(t)
    return (v[..., 0] * np.sin(theta) - v[..., 1] * np.cos(theta)) / ell


@dataclass(frozen=True)
class BackTrack:
    ts: np.ndarray
    gamma: np.ndarray  # (m, 2)
    theta: np.ndarray  # unwrapped
    s: np.ndarray  # rear speed Gamma' . r
    theta_dot: np.ndarray
    ell: float
    theta0: float
    stability: str
    closure_residual: dict
    cusps: list = field(default_factory=list)  # (t*, sign)
    rho: int | None = None
    mu: int | None = None
    mu_reliable: bool = False
    ok: bool = False
    notes: list = field(default_factory=list)
    front: PlaneCurve | None = field(default=None, repr=False, compare=False)

    @property
    def samples(self):
        return [(float(t), self.gamma[k].copy(), float(self.theta[k]), float(self.s[k])) for k, t in enumerate(self.ts)]

    def no_skid_residual(self) -> float:
        """sup |ell theta' - (X' sin theta - Y' cos theta)| with theta' from 4th-order differences."""
        h = self.ts[1] - self.ts[0]
        th = self.theta
        dth = (th[:-4] - 8 * th[1:-3] + 8 * th[3:-1] - th[4:]) / (12 * h)
        v = self.front.d1(self.ts[2:-2])
        rhs = v[:, 0] * np.sin(th[2:-2]) - v[:, 1] * np.cos(th[2:-2])
        return float(np.max(np.abs(self.ell * dth - rhs)))

    def to_csv_rows(self):
        yield ("t", "gx", "gy", "theta", "s")
        for k, t in enumerate(self.ts):
            yield tuple(repr(float(x)) for x in (t, self.gamma[k, 0], self.gamma[k, 1], self.theta[k], self.s[k]))

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "theta0": self.theta0,
            "stability": self.stability,
            "closure_residual": dict(self.closure_residual),
            "cusps": [[t, sgn] for t, sgn in self.cusps],
            "rho": self.rho,
            "mu": self.mu,
            "mu_reliable": self.mu_reliable,
            "ok": self.ok,
            "notes": list(self.notes),
        }


def _hermite(t, t0, t1, y0, y1, d0, d1):
    h = t1 - t0
    u = (t - t0) / h
    return ((2 * u**3 - 3 * u**2 + 1) * y0 + (u**3 - 2 * u**2 + u) * h * d0
            + (-2 * u**3 + 3 * u**2) * y1 + (u**3 - u**2) * h * d1)


def _locate_cusps(front: PlaneCurve, ell, ts, theta, theta_dot, s):
    """Zeros of s by sign change and bisection; returns (t*, theta*) arrays."""
    k = np.flatnonzero(np.sign(s[:-1]) * np.sign(s[1:]) < 0)
    k = np.concatenate([k, np.flatnonzero(s[:-1] == 0)])
    k = np.unique(k)
    if len(k) == 0:
        return np.empty(0), np.empty(0)
    lo, hi = ts[k].copy(), ts[k + 1].copy()
    s_lo = s[k]

    def theta_at(t):
        return _hermite(t, ts[k], ts[k + 1], theta[k], theta[k + 1], theta_dot[k], theta_dot[k + 1])

    def speed(t):
        th = theta_at(t)
        v = front.d1(t)
        return v[:, 0] * np.cos(th) + v[:, 1] * np.sin(th)

    for _ in range(60):
        mid = 0.5 * (lo + hi)
        sm = speed(mid)
        left = np.sign(sm) == np.sign(s_lo)
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    t_star = 0.5 * (lo + hi)
    return t_star, theta_at(t_star)


def _speed_derivative(front: PlaneCurve, ell, t, theta):
    # s' = Gamma'' . r - ell theta'^2
    a = front.d2(t)
    thd = theta_rate(front, ell, t, theta)
    return a[..., 0] * np.cos(theta) + a[..., 1] * np.sin(theta) - ell * thd**2, thd


def cusps_and_maslov(bt: BackTrack) -> dict:
    """Cusps of the rear track and the Maslov index, by two routes.

    ``mu_winding`` is twice the winding of (s, -ell theta') about the origin;
    ``mu_cusps`` sums sign(s' theta') over the zeros of s.  The index is
    reliable when the zeros are transversal and both routes agree.
    """
    front, ell = bt.front, bt.ell
    s, thd = bt.s, bt.theta_dot
    notes = []
    scale = float(np.max(np.hypot(*front.d1(bt.ts).T)))
    if np.max(np.abs(s)) < 1e-9 * scale:
        return {"cusps": [], "mu": None, "mu_winding": None, "mu_cusps": None, "reliable": False,
                "notes": ["rear speed vanishes identically (stationary rear wheel)"]}
    w = s + 1j * MASLOV_FRAMING * ell * thd
    ang = np.angle(w)
    step = (np.diff(ang) + np.pi) % (2 * np.pi) - np.pi
    turns = step.sum() / (2 * np.pi)
    reliable = bool(np.all(np.abs(step) < np.pi / 2)) and abs(turns - round(turns)) < 1e-3
    if not reliable:
        notes.append(f"winding of (s, -ell theta') not resolved: {turns:.4g} turns")
    mu_w = 2 * int(round(turns))
    t_star, th_star = _locate_cusps(front, ell, bt.ts, bt.theta, thd, s)
    ds_grid, _ = _speed_derivative(front, ell, bt.ts, bt.theta)
    ds, thd_star = _speed_derivative(front, ell, t_star, th_star)
    cusps = []
    L = bt.ts[-1] - bt.ts[0]
    for t, d, q in zip(t_star, ds, thd_star):
        if abs(d) < DEGENERATE_CUSP * np.max(np.abs(ds_grid)) or abs(q) < DEGENERATE_CUSP * np.max(np.abs(thd)):
            reliable = False
            notes.append(f"tangential zero of s at t={t:.6g}")
        # the closing point t = L repeats t = 0
        if abs(t - bt.ts[-1]) < 1e-12 * max(1.0, L) and any(abs(c[0] - bt.ts[0]) < 1e-9 for c in cusps):
            continue
        cusps.append((float(t), int(np.sign(d * q))))
    mu_c = sum(sgn for _, sgn in cusps)
    if mu_c != mu_w:
        reliable = False
        notes.append(f"cusp count {mu_c} disagrees with winding {mu_w}")
    return {"cusps": cusps, "mu": mu_w, "mu_winding": mu_w, "mu_cusps": mu_c, "reliable": reliable, "notes": notes}


def _closure(ts, gamma, theta, front: PlaneCurve, ell: float) -> tuple[dict, bool]:
    gap = float(np.hypot(*(gamma[-1] - gamma[0])))
    turn = theta[-1] - theta[0]
    angle_gap = float(abs(turn - 2 * np.pi * round(turn / (2 * np.pi))))
    scale = max(float(np.max(np.ptp(gamma, axis=0))), front.diameter(), ell)
    ok = gap < CLOSURE_TOL * scale and angle_gap < CLOSURE_TOL
    return {"position_gap": gap, "angle_gap": angle_gap}, ok


def back_track(front: PlaneCurve, ell: float, theta0: float, steps: int = DEFAULT_TRACK_STEPS,
               backward: bool = False, stability: str = "") -> BackTrack:
    """Rear track from the initial angle ``theta0`` (imposed at the end when ``backward``)."""
    if front.kind == "polygon":
        raise CurveError("rear tracks are computed for smooth fronts")
    ts, theta = theta_flow(front, ell, theta0, steps, backward=backward)
    if backward:
        # present the track starting in (-pi, pi]
        shift = 2 * np.pi * np.round(theta[0] / (2 * np.pi))
        theta = theta - shift
    v = front.d1(ts)
    r = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    gamma = front.position(ts) + ell * r
    s = v[:, 0] * r[:, 0] + v[:, 1] * r[:, 1]
    thd = (v[:, 0] * r[:, 1] - v[:, 1] * r[:, 0]) / ell
    closure, ok = _closure(ts, gamma, theta, front, ell)
    bt = BackTrack(ts, gamma, theta, s, thd, float(ell), float(theta[0]), stability, closure, ok=ok, front=front)
    notes = []
    rho = None
    if ok and front.closed:
        try:
            rho = rotation_number_rear(bt)
        except ValueError as exc:
            notes.append(str(exc))
    elif not ok:
        notes.append(f"track does not close: {closure}")
    info = cusps_and_maslov(bt) if front.closed else {"cusps": [], "mu": None, "reliable": False, "notes": []}
    return BackTrack(ts, gamma, theta, s, thd, float(ell), float(theta[0]), stability, closure,
                     cusps=info["cusps"], rho=rho, mu=info["mu"], mu_reliable=info["reliable"], ok=ok,
                     notes=notes + info["notes"], front=front)


def closed_back_tracks(curve: PlaneCurve, ell: float = 1.0, report: MonodromyReport | None = None,
                       steps: int = DEFAULT_TRACK_STEPS, tol: float = PARABOLIC_TOL) -> list[BackTrack]:
    """Rear tracks started at the fixed directions of the monodromy.

    Hyperbolic: attracting track (integrated forward) then repelling track
    (integrated backward from the end of the period).  Parabolic: the single
    neutral track.  Elliptic: none.
    """
    if not curve.closed:
        raise CurveError("closed back tracks need a closed front")
    if report is None:
        report = monodromy(curve, ell, tol=tol)
    if report.kind == IDENTITY:
        raise MarginalClassificationError(
            f"monodromy is the identity within {report.tol:.2g} (margin {report.margin:.3g}): every track closes")
    if report.kind == ELLIPTIC:
        return []
    out = []
    for fd in report.fixed:
        backward = fd.stability == "repelling"
        out.append(back_track(curve, ell, fd.theta, steps, backward=backward, stability=fd.stability))
    if report.kind == HYPERBOLIC and len(out) != 2:
        raise MarginalClassificationError("hyperbolic monodromy without two fixed directions")
    return out


def rotation_number_rear(bt: BackTrack) -> int:
    turns = (bt.theta[-1] - bt.theta[0]) / (2 * np.pi)
    if abs(turns - round(turns)) >= 1e-3:
        raise ValueError(f"rear frame turns {turns:.6g} times: not closed")
    return int(round(turns))


def rot_identity_check(front: PlaneCurve, bt: BackTrack) -> float:
    """rho(front) - rho(rear) - mu / 2; zero when the identity holds."""
    if not bt.mu_reliable or bt.mu is None:
        raise DegenerateCuspError("; ".join(bt.notes) or "Maslov index unreliable")
    rho_rear = bt.rho if bt.rho is not None else rotation_number_rear(bt)
    return rotation_number(front) - rho_rear - bt.mu / 2


def length_bound_check(front: PlaneCurve, bt: BackTrack, ell: float | None = None) -> dict:
    """L >= 2 pi ell |rho(rear)|, with the equality case (front a circle of radius ell)."""
    ell = bt.ell if ell is None else ell
    rho = bt.rho if bt.rho is not None else rotation_number_rear(bt)
    lhs = curve_length(front)
    rhs = 2 * np.pi * ell * abs(rho)
    k = curvature(front, front.grid(1024, endpoint=False))
    is_circle = bool(np.max(np.abs(np.abs(k) * ell - 1)) < 1e-6 and np.all(np.sign(k) == np.sign(k[0])))
    return {"lhs": lhs, "rhs": rhs, "ok": bool(lhs >= rhs - 1e-8),
            "equality": bool(abs(lhs - rhs) < 1e-6 and is_circle)}
