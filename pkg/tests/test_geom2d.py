import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from bikemono.geom2d import (
    CurveError,
    ImmersionError,
    PolygonPath,
    analytic_curve,
    arclength_reparam,
    circle,
    curvature,
    curve_length,
    curve_spec_json,
    ellipse,
    figure_eight,
    fish_front,
    global_invariants,
    make_named_curve,
    max_abs_curvature,
    parse_curve_spec,
    rectangle,
    sampled_curve,
    segment,
    support_curve,
)


def test_named_builders():
    c = make_named_curve("circle", r=1)
    assert c.closed
    assert global_invariants(c)["length"] == pytest.approx(2 * math.pi, abs=1e-12)
    assert global_invariants(make_named_curve("ellipse", a=2, b=1))["area"] == pytest.approx(2 * math.pi, abs=1e-12)
    assert np.allclose(fish_front().position(0.0), [1.0, 0.0], atol=1e-15)


def test_fish_front_matches_closed_form():
    t = np.linspace(0, 2 * np.pi, 17)
    g = np.stack([2 * np.cos(t), np.sin(2 * t) * np.sin(t) ** 2], axis=1)
    off = np.sqrt(2 / (3 - np.cos(6 * t)))[:, None] * np.stack([-np.ones_like(t), np.sin(3 * t)], axis=1)
    assert np.allclose(fish_front().position(t), g + off, atol=1e-14)


def test_builder_errors():
    with pytest.raises(CurveError):
        make_named_curve("spiral")
    with pytest.raises(CurveError):
        ellipse(-1.0, 1.0)
    with pytest.raises(CurveError):
        PolygonPath(np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]), True)


def test_curvature_examples():
    assert np.allclose(curvature(circle(2.0), np.linspace(0, 6, 7)), 0.5)
    assert curvature(ellipse(2.0, 1.0), 0.0) == pytest.approx(2.0, rel=1e-12)
    assert np.allclose(curvature(segment(3.0), np.linspace(0, 3, 5)), 0.0)
    assert segment(3.0).t_span == (0.0, 3.0)


def test_arclength_reparam():
    u = arclength_reparam(circle(1.0), 1000)
    assert u.t_span[1] - u.t_span[0] == pytest.approx(2 * math.pi, abs=1e-8)
    e = arclength_reparam(ellipse(2.0, 1.0), 4096)
    oracle, _ = quad(lambda t: math.hypot(2 * math.sin(t), math.cos(t)), 0, 2 * math.pi, epsabs=1e-13, limit=200)
    assert oracle == pytest.approx(9.6884482, abs=1e-7)
    assert e.period == pytest.approx(oracle, rel=1e-8)
    speed = np.hypot(*e.d1(e.grid(4096)).T)
    assert np.max(np.abs(speed - 1)) < 1e-8


def test_global_invariant_examples():
    inv = global_invariants(circle(1.0))
    assert inv["rho"] == 1 and inv["convex"]
    assert inv["area"] == pytest.approx(math.pi, abs=1e-12)
    assert global_invariants(fish_front())["rho"] == 1
    f8 = global_invariants(figure_eight())
    assert f8["rho"] == 0 and not f8["convex"]
    r = global_invariants(rectangle(2.0, 3.0))
    assert r["area"] == pytest.approx(6.0) and r["length"] == pytest.approx(10.0) and r["convex"]


def test_reparametrization_invariance():
    for c in (ellipse(2.0, 1.0), fish_front(), support_curve(1.5, [0.05, -0.03], [0.02, 0.01])):
        u = arclength_reparam(c, 8192)
        a, b = global_invariants(c), global_invariants(u, 8192)
        assert b["length"] == pytest.approx(a["length"], abs=1e-6)
        assert b["area"] == pytest.approx(a["area"], abs=1e-6)
        assert a["rho"] == b["rho"]
        # same curvature at matching points
        t = np.linspace(0.1, 5.9, 9)
        s = np.array([curve_length_to(c, x) for x in t])
        assert np.allclose(curvature(u, s), curvature(c, t), atol=1e-6)


def curve_length_to(c, t):
    return quad(lambda x: float(np.hypot(*c.d1(x))), 0, t, epsabs=1e-13, limit=200)[0]


@given(st.floats(0.1, 10.0), st.floats(0.2, 3.0), st.floats(0.2, 3.0))
def test_scaling_law(c, a, b):
    e = ellipse(a, b)
    t = np.linspace(0, 2 * np.pi, 11)
    assert np.allclose(curvature(e.scaled(c), t), curvature(e, t) / c, rtol=1e-10, atol=0)


@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0))
@settings(max_examples=30)
def test_ellipses_are_convex(a, b):
    assert global_invariants(ellipse(a, b))["convex"]


def test_closure_invariant():
    for c in (circle(3.0), ellipse(2.0, 0.5), fish_front(), figure_eight()):
        gap = np.hypot(*(c.position(c.t_span[1]) - c.position(c.t_span[0])))
        assert gap <= 1e-12 * c.diameter()


def test_sampled_curve_matches_analytic():
    t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    pts = np.stack([2 * np.cos(t), np.sin(t)], axis=1)
    s = sampled_curve(pts)
    assert global_invariants(s)["length"] == pytest.approx(curve_length(ellipse(2.0, 1.0)), rel=1e-8)
    assert max_abs_curvature(s) == pytest.approx(2.0, rel=1e-5)


def test_immersion_violation():
    # semicubical cusp (t^2, t^3) stops at t = 0
    cusp = analytic_curve(lambda t: (t**2, t**3), lambda t: (2 * t, 3 * t**2), lambda t: (2 + 0 * t, 6 * t),
                          (-1.0, 1.0), False, "cusp", {})
    assert curvature(cusp, 0.5) == pytest.approx(6 * 0.25 / (4 * 0.25 + 9 * 0.0625) ** 1.5, rel=1e-12)
    with pytest.raises(ImmersionError):
        curvature(cusp, np.array([0.0]))


def test_spec_round_trip():
    for spec in ("ellipse:2,1", {"kind": "circle", "params": {"r": 2}}, {"kind": "fish-front", "params": {}},
                 {"kind": "ellipse", "params": {"a": 2, "b": 1}, "scale": 3.0}):
        c = parse_curve_spec(spec)
        d = parse_curve_spec(curve_spec_json(c))
        t = np.linspace(0, 1, 5)
        assert np.allclose(c.position(t), d.position(t))
    assert parse_curve_spec("fish").name == "fish-front"
    assert circle(2.0).label == "circle:r=2"
