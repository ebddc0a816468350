"""SL(2,R) algebra, trace classification, the circle action and upper half-plane geometry."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

PARABOLIC_TOL = 1e-7


def det_rounding(m11, m12, m21, m22):
    """Rounding band of the computed determinant (elementwise for arrays)."""
    return 8 * 2.3e-16 * (np.abs(m11 * m22) + np.abs(m12 * m21)) + 1e-15


class MarginalClassificationError(ValueError):
    """The trace is too close to +-2 for the requested eigen-data."""


@dataclass(frozen=True)
class Sl2Map:
    """Real 2x2 matrix of determinant 1, acting by p -> (m11 p + m12)/(m21 p + m22)."""

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            object.__setattr__(self, name, float(getattr(self, name)))
        det = self.m11 * self.m22 - self.m12 * self.m21
        if not math.isfinite(det):
            raise ValueError(f"Sl2Map needs a finite determinant, got {det!r}")
        # For large entries det = 1 is not representable: the computed det carries
        # rounding of size eps * (|m11 m22| + |m12 m21|).  Within that band the
        # entries are kept; dividing by sqrt(det) would only inject the rounding.
        if abs(det - 1.0) <= det_rounding(self.m11, self.m12, self.m21, self.m22):
            return
        if not det > 0:
            raise ValueError(f"Sl2Map needs positive determinant, got {det!r}")
        s = math.sqrt(det)
        for name in ("m11", "m12", "m21", "m22"):
            object.__setattr__(self, name, getattr(self, name) / s)

    @classmethod
    def from_array(cls, m) -> "Sl2Map":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "Sl2Map":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def inverse(self) -> "Sl2Map":
        return Sl2Map(self.m22, -self.m12, -self.m21, self.m11)

    def __matmul__(self, other: "Sl2Map") -> "Sl2Map":
        return Sl2Map(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def __neg__(self) -> "Sl2Map":
        return Sl2Map(-self.m11, -self.m12, -self.m21, -self.m22)

    def power(self, n: int) -> "Sl2Map":
        """Integer power by repeated squaring (negative n uses the inverse)."""
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        out = Sl2Map.identity()
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def to_json(self) -> list[list[float]]:
        return [[self.m11, self.m12], [self.m21, self.m22]]

    @classmethod
    def from_json(cls, data) -> "Sl2Map":
        return cls.from_array(data)


class MonodromyType(str, enum.Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"
    IDENTITY = "Identity"


@dataclass(frozen=True)
class MonodromyClass:
    kind: MonodromyType
    margin: float  # |tr| - 2
    tol: float = PARABOLIC_TOL

    def __str__(self) -> str:
        return self.kind.value

    def __eq__(self, other):
        if isinstance(other, (MonodromyType, str)):
            return self.kind == other
        if isinstance(other, MonodromyClass):
            return self.kind == other.kind
        return NotImplemented

    def __hash__(self):
        return hash(self.kind)

    def to_json(self) -> dict:
        return {"class": self.kind.value, "margin": self.margin, "tol": self.tol}


ELLIPTIC = MonodromyType.ELLIPTIC
PARABOLIC = MonodromyType.PARABOLIC
HYPERBOLIC = MonodromyType.HYPERBOLIC
IDENTITY = MonodromyType.IDENTITY


def classify(m: Sl2Map, tol: float = PARABOLIC_TOL) -> MonodromyClass:
    if not tol > 0:
        raise ValueError("tol must be positive")
    margin = abs(m.trace) - 2.0
    if margin > tol:
        kind = HYPERBOLIC
    elif margin < -tol:
        kind = ELLIPTIC
    else:
        s = 1.0 if m.trace > 0 else -1.0
        off = max(abs(m.m11 - s), abs(m.m22 - s), abs(m.m12), abs(m.m21))
        kind = IDENTITY if off <= tol else PARABOLIC
    return MonodromyClass(kind, margin, tol)


def exp_traceless(A) -> Sl2Map:
    """exp(A) for traceless 2x2 A in closed form."""
    A = np.asarray(A, dtype=float)
    a, b, c = A[0, 0], A[0, 1], A[1, 0]
    d2 = a * a + b * c  # delta^2 = -det A
    if d2 > 0:
        d = math.sqrt(d2)
        ch, sc = math.cosh(d), math.sinh(d) / d
    elif d2 < 0:
        d = math.sqrt(-d2)
        ch, sc = math.cos(d), math.sin(d) / d
    else:
        ch, sc = 1.0, 1.0
    return Sl2Map(ch + sc * a, sc * b, sc * c, ch - sc * a)


def exp_traceless_batch(a, b, c) -> np.ndarray:
    """Vectorized exp of [[a, b], [c, -a]]; returns shape (n, 2, 2)."""
    a, b, c = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, c)))
    d2 = a * a + b * c
    d = np.sqrt(np.abs(d2))
    ch = np.where(d2 >= 0, np.cosh(d), np.cos(d))
    with np.errstate(invalid="ignore", divide="ignore"):
        sc = np.where(d2 >= 0, np.sinh(d), np.sin(d)) / d
    sc = np.where(d < 1e-8, 1.0 + d2 / 6.0, sc)
    out = np.empty(a.shape + (2, 2))
    out[..., 0, 0] = ch + sc * a
    out[..., 0, 1] = sc * b
    out[..., 1, 0] = sc * c
    out[..., 1, 1] = ch - sc * a
    return out


def mul_batch(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Elementwise 2x2 products x[k] @ y[k]."""
    out = np.empty(np.broadcast_shapes(x.shape, y.shape))
    out[..., 0, 0] = x[..., 0, 0] * y[..., 0, 0] + x[..., 0, 1] * y[..., 1, 0]
    out[..., 0, 1] = x[..., 0, 0] * y[..., 0, 1] + x[..., 0, 1] * y[..., 1, 1]
    out[..., 1, 0] = x[..., 1, 0] * y[..., 0, 0] + x[..., 1, 1] * y[..., 1, 0]
    out[..., 1, 1] = x[..., 1, 0] * y[..., 0, 1] + x[..., 1, 1] * y[..., 1, 1]
    return out


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """E[n-1] @ ... @ E[1] @ E[0] by pairwise (tree) reduction."""
    p = np.asarray(mats, dtype=float)
    if len(p) == 0:
        return np.eye(2)
    while len(p) > 1:
        if len(p) % 2:
            p = np.concatenate([p, np.eye(2)[None]])
        p = mul_batch(p[1::2], p[0::2])
    return p[0]


def cumulative_product(mats: np.ndarray) -> np.ndarray:
    """Prefix products P[k] = E[k-1] @ ... @ E[0], with P[0] = I; shape (n+1, 2, 2)."""
    p = np.array(mats, dtype=float)
    n, shift = len(p), 1
    while shift < n:
        nxt = p.copy()
        nxt[shift:] = mul_batch(p[shift:], p[:-shift])
        p, shift = nxt, shift * 2
    return np.concatenate([np.eye(2)[None], p])


def hopf(y1, y2):
    """Angle of (y1 + i y2)^2, i.e. the projective line [y] as a point of the circle."""
    return np.arctan2(2 * y1 * y2, y1 * y1 - y2 * y2)


def circle_action(m: Sl2Map | np.ndarray, theta):
    """Image of e^{i theta} under the projective action of m (well defined on PSL2)."""
    M = m.array if isinstance(m, Sl2Map) else np.asarray(m)
    h = np.asarray(theta, dtype=float) / 2
    v1, v2 = np.cos(h), np.sin(h)
    y1 = M[..., 0, 0] * v1 + M[..., 0, 1] * v2
    y2 = M[..., 1, 0] * v1 + M[..., 1, 1] * v2
    out = hopf(y1, y2)
    return float(out) if np.ndim(out) == 0 else out


def lifted_angles(mats: np.ndarray, theta0: float) -> np.ndarray:
    """Continuous angle history of circle_action(mats[k], theta0) (branch from theta0)."""
    raw = circle_action(mats, theta0)
    raw = np.atleast_1d(raw)
    first = theta0 + ((raw[0] - theta0 + np.pi) % (2 * np.pi) - np.pi)
    steps = (np.diff(raw) + np.pi) % (2 * np.pi) - np.pi
    return np.concatenate([[first], first + np.cumsum(steps)])


@dataclass(frozen=True)
class FixedDirection:
    theta: float
    stability: str  # "attracting" | "repelling" | "neutral"
    eigenvalue: float


def fixed_directions(m: Sl2Map, tol: float = PARABOLIC_TOL) -> list[FixedDirection]:
    """Fixed points of the circle action; attracting first for hyperbolic maps."""
    cls = classify(m, tol)
    if cls == ELLIPTIC:
        return []
    if cls == IDENTITY:
        raise MarginalClassificationError("identity map: every direction is fixed")
    tr = m.trace
    M = m.array
    if cls == PARABOLIC:
        lam = 1.0 if tr > 0 else -1.0
        N = M - lam * np.eye(2)
        row = N[np.argmax(np.abs(N).sum(axis=1))]
        v = np.array([-row[1], row[0]])
        return [FixedDirection(float(hopf(*v)), "neutral", lam)]
    disc = tr * tr / 4 - 1.0
    if disc <= 0:
        raise MarginalClassificationError(f"trace {tr!r} gives no real eigenvalues")
    big = tr / 2 + math.copysign(math.sqrt(disc), tr)
    small = 1.0 / big
    out = []
    for lam, label in ((big, "attracting"), (small, "repelling")):
        N = M - lam * np.eye(2)
        row = N[np.argmax(np.abs(N).sum(axis=1))]
        v = np.array([-row[1], row[0]])
        out.append(FixedDirection(float(hopf(*v)), label, lam))
    return out


# --------------------------------------------------------- hyperbolic plane


def hyp_distance(z: complex, w: complex) -> float:
    """Distance in the upper half-plane, curvature -1."""
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    if np.any(z.imag <= 0) or np.any(w.imag <= 0):
        raise ValueError("points must lie in the open upper half-plane")
    # 2 asinh(|z-w| / (2 sqrt(Im z Im w))) is the cancellation-free form of arccosh(1 + ...)
    d = 2 * np.arcsinh(np.abs(z - w) / (2 * np.sqrt(z.imag * w.imag)))
    return float(d) if d.ndim == 0 else d


def moebius_half_plane(m: Sl2Map | np.ndarray, z):
    M = m.array if isinstance(m, Sl2Map) else np.asarray(m)
    z = np.asarray(z, dtype=complex)
    out = (M[..., 0, 0] * z + M[..., 0, 1]) / (M[..., 1, 0] * z + M[..., 1, 1])
    return complex(out) if out.ndim == 0 else out


def cayley(z):
    """Upper half-plane -> Poincare disk, z -> (z - i)/(z + i)."""
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)
