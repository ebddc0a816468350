import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from bikemono.geom2d import arc, circle, ellipse, polygon_curve, segment, support_curve, tangent_arc  # noqa: E402
from bikemono.hyperdev import (  # noqa: E402
    chord_pair,
    curvature_transfer_check,
    develop,
    hyperbolic_speed,
    self_intersects,
)
from bikemono.moebius import classify, hyp_distance, moebius_half_plane  # noqa: E402
from bikemono.transport import monodromy, transport_smooth  # noqa: E402


def test_first_sample_and_speed():
    for c in (circle(2.0), ellipse(2.0, 1.0), support_curve(1.1, [0.05], [0.03])):
        dev = develop(c)
        assert dev.z[0] == 1j
        assert np.max(np.abs(hyperbolic_speed(dev) - 1)) < 1e-4


def test_initial_direction():
    c = ellipse(2.0, 1.0)
    dev = develop(c)
    h = dev.ts[1] - dev.ts[0]
    dz = (-3 * dev.z[0] + 4 * dev.z[1] - dev.z[2]) / (2 * h)
    v = dev.curve.d1(0.0)
    assert abs(dz - 1j * complex(v[0], -v[1])) < 1e-4


def test_segment_develops_to_geodesic():
    for a in (0.5, 2.0, 5.0):
        dev = develop(segment(a))
        assert hyp_distance(dev.z[0], dev.z[-1]) == pytest.approx(a, abs=1e-8)
        # the image is the vertical geodesic through i
        assert np.max(np.abs(dev.x)) < 1e-12


def test_unit_circle_develops_to_horocycle():
    dev = develop(circle(1.0))
    z = dev.z
    # the two horocycles through i tangent to the real direction there
    line = np.max(np.abs(z.imag - 1))
    small = np.max(np.abs(np.abs(z - 0.5j) - 0.5))
    assert min(line, small) < 1e-6


@pytest.mark.parametrize("c", [ellipse(2.0, 1.0), ellipse(3.0, 2.0), support_curve(1.4, [0.1, -0.05], [0.02, 0.03])])
def test_period_map_trace(c):
    dev = develop(c)
    ref = monodromy(c).trace
    assert dev.period_map.trace == pytest.approx(ref, abs=1e-8 * max(1, abs(ref)))
    assert classify(dev.period_map) == monodromy(c).cls


def test_periodicity():
    c = ellipse(2.0, 1.0)
    u = develop(c).curve
    L = u.period
    res = transport_smooth(u, 1.0, 2**13, refine=False, keep_samples=True, t_span=(0.0, 2 * L))
    m = res.mats
    z = (m[:, 1, 1] * 1j - m[:, 0, 1]) / (-m[:, 1, 0] * 1j + m[:, 0, 0])
    half = len(z) // 2
    h = res.mats[half]
    h_inv = np.array([[h[1, 1], -h[0, 1]], [-h[1, 0], h[0, 0]]])
    idx = np.linspace(0, half - 1, 64).astype(int)
    moved = moebius_half_plane(h_inv, z[idx])
    assert np.max(hyp_distance(moved, z[idx + half])) < 1e-6


def test_curvature_transfer():
    assert curvature_transfer_check(develop(circle(2.0))) < 1e-3
    assert curvature_transfer_check(develop(segment(3.0))) < 1e-3
    assert curvature_transfer_check(develop(ellipse(2.0, 1.0))) < 1e-3
    assert curvature_transfer_check(develop(circle(3.0), ell=2.0)) < 1e-3
    with pytest.raises(ValueError):
        curvature_transfer_check(develop(circle(2.0), steps=256))


def test_chord_examples():
    r = chord_pair(segment(2.0))
    assert r["d"] == pytest.approx(2.0) and r["d_tilde"] == pytest.approx(2.0, abs=1e-10)
    r = chord_pair(arc(1.0, math.pi))
    assert r["d"] == pytest.approx(2.0)
    assert r["d_tilde"] == pytest.approx(2 * math.asinh(math.pi / 2), abs=1e-6)
    assert r["d_tilde"] == pytest.approx(2.4668062, abs=1e-6)


def _turns(vertices):
    e = np.diff(vertices, axis=0)
    ang = np.arctan2(e[:, 1], e[:, 0])
    return (np.diff(ang) + np.pi) % (2 * np.pi) - np.pi, np.hypot(e[:, 0], e[:, 1])


def test_polygon_arm_against_hyperboloid():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.6, 0.7], [1.5, 1.9]])
    turns, lengths = _turns(verts)
    ref = oracles.hyperboloid_polygon(lengths, -turns)
    d_ref = oracles.hyperboloid_distance(ref[0], ref[-1])
    r = chord_pair(polygon_curve(verts, closed=False))
    assert r["d_tilde"] == pytest.approx(d_ref, abs=1e-8)
    assert r["d"] <= r["d_tilde"]


def test_polygon_development_vertexwise():
    verts = np.array([[0.0, 0.0], [1.3, -0.2], [2.0, 0.9], [1.2, 2.0], [-0.3, 1.1]])
    turns, lengths = _turns(np.vstack([verts, verts[:1]]))
    ref = oracles.hyperboloid_polygon(lengths, -turns)
    dev = develop(polygon_curve(verts, closed=True), subdivide=16)
    zs = dev.z[::16]
    assert len(zs) == len(ref)
    for i in range(len(ref)):
        for j in range(i + 1, len(ref)):
            d = hyp_distance(zs[i], zs[j])
            assert d == pytest.approx(oracles.hyperboloid_distance(ref[i], ref[j]), abs=1e-8)


@given(st.floats(0.2, 3.0), st.floats(0.05, math.pi), st.lists(st.floats(-0.4, 0.4), max_size=3))
@settings(max_examples=40)
def test_smooth_arm_lemma(length, turning, coeffs):
    a = np.array(coeffs) / max(1, len(coeffs))
    r = chord_pair(tangent_arc(length, turning, a, -a))
    assert r["d"] <= r["d_tilde"] + 1e-9
    # strictly curved arcs are strict
    assert r["d_tilde"] - r["d"] > 1e-9


def test_self_intersection_examples():
    assert not self_intersects(develop(circle(2.0)), window=3).hit
    assert not self_intersects(develop(ellipse(2.0, 1.0)), window=1).hit
    assert not self_intersects(develop(support_curve(1.3, [0.05, 0.02], [0.01, -0.02])), window=1).hit
    # elliptic monodromy with irrational rotation fills an annulus
    e = ellipse(0.6, 0.4)
    assert classify(develop(e).period_map).kind.value == "Elliptic"
    res = self_intersects(develop(e), window=50)
    assert res.hit and res.witness is not None
    with pytest.raises(ValueError):
        self_intersects(develop(e), window=0)
