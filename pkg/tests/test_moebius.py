import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from bikemono.geom2d import rectangle
from bikemono.moebius import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY,
    PARABOLIC,
    MarginalClassificationError,
    Sl2Map,
    circle_action,
    classify,
    exp_traceless,
    exp_traceless_batch,
    fixed_directions,
    hopf,
    hyp_distance,
    moebius_half_plane,
)
from bikemono.transport import transport_polygon

entries = st.floats(-5, 5, allow_nan=False)
angles = st.floats(-math.pi, math.pi, allow_nan=False)


def angle_gap(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


@st.composite
def sl2(draw, scale=3.0):
    a, b, c = (draw(st.floats(-scale, scale, allow_nan=False)) for _ in range(3))
    return exp_traceless([[a, b], [c, -a]])


def test_renormalized_on_construction():
    m = Sl2Map(2.0, 0.0, 0.0, 2.0)
    assert m.to_json() == [[1.0, 0.0], [0.0, 1.0]]
    with pytest.raises(ValueError):
        Sl2Map(0.0, 1.0, 1.0, 0.0)
    # huge hyperbolic entries: det = 1 is below rounding, entries are kept
    big = Sl2Map(-95057888.34989381, 80545888.04486862, 111011526.30392748, -94063965.91152678)
    assert big.trace == pytest.approx(-189121854.2614206)


def test_classify_examples():
    assert classify(Sl2Map(3.0, 1.0, -1.0, 0.0)).kind == HYPERBOLIC
    assert classify(Sl2Map.identity()).kind == IDENTITY
    assert classify(-Sl2Map.identity()).kind == IDENTITY
    assert classify(Sl2Map(1.0, 1.0, 0.0, 1.0)).kind == PARABOLIC
    assert classify(Sl2Map(0.0, -1.0, 1.0, 0.0)).kind == ELLIPTIC
    with pytest.raises(ValueError):
        classify(Sl2Map.identity(), 0.0)


def test_classification_tol_band():
    m = Sl2Map.from_array(exp_traceless([[1e-3, 0.0], [0.0, -1e-3]]).array @ np.array([[1, 1], [0, 1]]))
    assert classify(m, 1e-7).kind == HYPERBOLIC
    assert classify(m, 1e-3).kind == PARABOLIC


def test_exp_traceless_examples():
    h = exp_traceless(-0.5 * np.diag([1.0, -1.0]))
    assert np.allclose(h.array, np.diag([math.exp(-0.5), math.exp(0.5)]), atol=1e-15)
    assert np.allclose(exp_traceless(np.zeros((2, 2))).array, np.eye(2))
    v = exp_traceless(-0.5 * np.array([[0.0, 1.0], [1.0, 0.0]]))
    c, s = math.cosh(0.5), math.sinh(0.5)
    assert np.allclose(v.array, [[c, -s], [-s, c]], atol=1e-15)


def test_exp_traceless_against_scipy():
    from scipy.linalg import expm

    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b, c = rng.uniform(-3, 3, 3)
        A = np.array([[a, b], [c, -a]])
        assert np.allclose(exp_traceless(A).array, expm(A), rtol=1e-11, atol=1e-12)


def test_det_of_exponentials():
    rng = np.random.default_rng(2)
    a, b, c = rng.uniform(-5, 5, (3, 10_000))
    m = exp_traceless_batch(a, b, c)
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    # relative to the entry scale, which reaches e^{5 sqrt 2}
    scale = np.abs(m[:, 0, 0] * m[:, 1, 1]) + np.abs(m[:, 0, 1] * m[:, 1, 0])
    assert np.max(np.abs(det - 1) / np.maximum(1, scale)) < 1e-12
    a, b, c = rng.uniform(-1, 1, (3, 10_000))
    m = exp_traceless_batch(a, b, c)
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    assert np.max(np.abs(det - 1)) < 1e-12


def test_circle_action_examples():
    assert circle_action(Sl2Map.identity(), 1.234) == pytest.approx(1.234)
    assert hopf(1.0, 1.0) == pytest.approx(math.pi / 2)
    d = Sl2Map(math.exp(0.5), 0.0, 0.0, math.exp(-0.5))
    assert circle_action(d, math.pi / 2) == pytest.approx(2 * math.atan(math.tan(math.pi / 4) * math.exp(-1)), abs=1e-12)
    # stereographic oracle p -> p / e; frozen value
    assert circle_action(d, math.pi / 2) == pytest.approx(0.7050268435552, abs=1e-12)


@given(sl2(), sl2(), angles)
def test_circle_action_is_group_action(m1, m2, theta):
    lhs = circle_action(m1 @ m2, theta)
    rhs = circle_action(m1, circle_action(m2, theta))
    assert angle_gap(lhs, rhs) < 1e-9


@given(sl2(), angles)
def test_circle_action_on_psl2(m, theta):
    assert angle_gap(circle_action(m, theta), circle_action(-m, theta)) < 1e-12


@given(sl2(), sl2(1.0))
def test_classify_conjugation_invariant(m, g):
    assume(abs(abs(m.trace) - 2) > 1e-6)
    assert classify(g @ m @ g.inverse()) == classify(m)


@given(sl2())
def test_hyperbolic_fixed_angles(m):
    assume(abs(m.trace) - 2 > 1e-3)
    fixed = fixed_directions(m)
    assert [f.stability for f in fixed] == ["attracting", "repelling"]
    for f in fixed:
        assert angle_gap(circle_action(m, f.theta), f.theta) < 1e-9


def test_fixed_direction_examples():
    fixed = fixed_directions(Sl2Map(2.0, 0.0, 0.0, 0.5))
    assert fixed[0].stability == "attracting" and fixed[0].theta == pytest.approx(0.0, abs=1e-15)
    assert angle_gap(fixed[1].theta, math.pi) < 1e-15
    rot = Sl2Map(math.cos(0.3), -math.sin(0.3), math.sin(0.3), math.cos(0.3))
    assert fixed_directions(rot) == []
    with pytest.raises(MarginalClassificationError):
        fixed_directions(Sl2Map.identity())
    (p,) = fixed_directions(Sl2Map(1.0, 1.0, 0.0, 1.0))
    assert p.stability == "neutral" and angle_gap(p.theta, 0.0) < 1e-15


def test_rectangle_attracting_by_power_iteration():
    m = transport_polygon(rectangle(3.0, 3.0)).monodromy
    attracting, repelling = fixed_directions(m)
    rng = np.random.default_rng(3)
    for theta in rng.uniform(-math.pi, math.pi, 10):
        for _ in range(200):
            theta = circle_action(m, theta)
        assert angle_gap(theta, attracting.theta) < 1e-9
    assert angle_gap(repelling.theta, attracting.theta) > 1e-3


def test_hyp_distance_examples():
    assert hyp_distance(1j, 1j) == 0.0
    assert hyp_distance(1j, math.e * 1j) == pytest.approx(1.0, abs=1e-15)
    assert hyp_distance(1j, 1 + 1j) == pytest.approx(math.acosh(1.5), abs=1e-15)
    assert math.acosh(1.5) == pytest.approx(0.96242, abs=1e-5)
    with pytest.raises(ValueError):
        hyp_distance(1j, -1j)


def test_hyp_distance_by_geodesic_integration():
    # the geodesic from i to 1+i is the circle |z - 1/2| = sqrt(5)/2; integrate |dz|/Im z along it
    from scipy.integrate import quad

    r = math.sqrt(5) / 2
    a0, a1 = math.atan2(1, -0.5), math.atan2(1, 0.5)
    length, _ = quad(lambda a: r / (r * math.sin(a)), a1, a0, epsabs=1e-14)
    assert hyp_distance(1j, 1 + 1j) == pytest.approx(length, abs=1e-12)


def test_moebius_examples():
    assert moebius_half_plane(Sl2Map.identity(), 0.3 + 2j) == 0.3 + 2j
    d = Sl2Map(math.exp(0.5), 0.0, 0.0, math.exp(-0.5))
    assert moebius_half_plane(d, 1j) == pytest.approx(math.e * 1j)


@given(sl2(2.0), st.complex_numbers(max_magnitude=3).filter(lambda z: z.imag > 0.05),
       st.complex_numbers(max_magnitude=3).filter(lambda z: z.imag > 0.05))
def test_isometry(m, z, w):
    d0 = hyp_distance(z, w)
    d1 = hyp_distance(moebius_half_plane(m, z), moebius_half_plane(m, w))
    assert d1 == pytest.approx(d0, abs=1e-10 * max(1.0, d0) * 10)


def test_isometry_hundred_pairs():
    rng = np.random.default_rng(4)
    m = exp_traceless([[0.4, 1.1], [-0.7, -0.4]])
    z = rng.uniform(-2, 2, 100) + 1j * rng.uniform(0.1, 2, 100)
    w = rng.uniform(-2, 2, 100) + 1j * rng.uniform(0.1, 2, 100)
    d0 = hyp_distance(z, w)
    d1 = hyp_distance(moebius_half_plane(m, z), moebius_half_plane(m, w))
    assert np.max(np.abs(d1 - d0)) < 1e-10


def test_power_and_json():
    m = exp_traceless([[0.3, 0.2], [0.1, -0.3]])
    assert np.allclose(m.power(5).array, np.linalg.matrix_power(m.array, 5))
    assert np.allclose((m.power(-3) @ m.power(3)).array, np.eye(2))
    assert Sl2Map.from_json(m.to_json()) == m
