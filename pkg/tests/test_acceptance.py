"""Acceptance criteria, one test each.  Every test records a PASS/FAIL line that is
printed in the terminal summary (and by ``python tests/test_acceptance.py``).

Criteria 1 and 2 are checked exactly as stated, against 2 - sinh^2(a/2) sinh^2(b/2).
The exact rectangle product is 2 - 4 sinh^2(a/2) sinh^2(b/2), so both fail;
test_transport.py checks the exact closed form and its parabolic boundary.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from conftest import ACCEPTANCE_LINES  # noqa: E402

from bikemono.geom2d import arc, circle, ellipse, fish_front, rectangle, tangent_arc  # noqa: E402
from bikemono.hyperdev import chord_pair, curvature_transfer_check, develop, hyperbolic_speed  # noqa: E402
from bikemono.moebius import ELLIPTIC, HYPERBOLIC, PARABOLIC, classify  # noqa: E402
from bikemono.scan import (  # noqa: E402
    convex_corpus,
    conjecture_harness,
    low_curvature_corpus,
    sweep_bike_length,
    theorem_suites,
)
from bikemono.tracks import closed_back_tracks, length_bound_check, rot_identity_check  # noqa: E402
from bikemono.transport import monodromy, polygonal_convergence, transport_polygon, transport_smooth  # noqa: E402


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


# 1 ------------------------------------------------------------------------


def test_01_rectangle_trace_formula():
    t = time.perf_counter()
    grid = np.linspace(0.1, 4.0, 40)
    worst = 0.0
    for a in grid:
        for b in grid:
            tr = transport_polygon(rectangle(a, b)).monodromy.trace
            worst = max(worst, abs(tr - oracles.rectangle_trace_stated(a, b)))
    dt = time.perf_counter() - t
    ok = worst < 1e-10 and dt < 5
    assert record(1, ok, f"max |tr - (2 - sinh^2(a/2) sinh^2(b/2))| = {worst:.3g} (< 1e-10), {dt:.2f} s (< 5 s)")


# 2 ------------------------------------------------------------------------


def test_02_rectangle_trichotomy_boundary():
    bad = []
    for a in np.linspace(0.8, 4.0, 17):
        s = 2 / math.sinh(a / 2)
        b = 2 * math.asinh(s)
        on = classify(transport_polygon(rectangle(a, b)).monodromy, 1e-7)
        above = classify(transport_polygon(rectangle(a * 1.01, b * 1.01)).monodromy, 1e-7)
        below = classify(transport_polygon(rectangle(a * 0.99, b * 0.99)).monodromy, 1e-7)
        if on != PARABOLIC or above != HYPERBOLIC or below != ELLIPTIC:
            bad.append((round(a, 3), str(on), str(above), str(below)))
    ok = not bad
    assert record(2, ok, f"{17 - len(bad)}/17 points on sinh(a/2)sinh(b/2)=2 classify (P, H above, E below); "
                         f"first miss {bad[0] if bad else None}")


# 3 ------------------------------------------------------------------------


def test_03_unit_circle_parabolic():
    c = circle(1.0)
    res = transport_smooth(c, 1.0, 2**14, refine=False)
    dev = abs(abs(res.monodromy.trace) - 2)
    ests = [transport_smooth(c, 1.0, 2**k, refine=False).error_estimate for k in (12, 13, 14, 15)]
    converging = all(e2 < e1 for e1, e2 in zip(ests, ests[1:]))
    ok = dev < 1e-6 and converging
    assert record(3, ok, f"||tr|-2| = {dev:.3g} at 2^14 (< 1e-6); error estimates {[f'{e:.2g}' for e in ests]}")


# 4 ------------------------------------------------------------------------


def test_04_circle_family():
    t = time.perf_counter()
    wrong = []
    for R in np.linspace(0.2, 5.0, 50):
        expect = HYPERBOLIC if oracles.circle_has_fixed_angle(R) else ELLIPTIC
        got = monodromy(circle(R), 1.0).cls
        if got != expect:
            wrong.append(R)
    dt = time.perf_counter() - t
    ok = not wrong and dt < 10
    assert record(4, ok, f"{50 - len(wrong)}/50 radii match the rotating-frame oracle, {dt:.2f} s (< 10 s)")


# 5 ------------------------------------------------------------------------


def test_05_development_fidelity():
    curves = [circle(2.0), ellipse(2.0, 1.0)] + convex_corpus(20, seed=5)
    worst_speed = worst_k = worst_tr = 0.0
    for c in curves:
        dev = develop(c, 1.0)
        worst_speed = max(worst_speed, float(np.max(np.abs(hyperbolic_speed(dev) - 1))))
        worst_k = max(worst_k, curvature_transfer_check(dev))
        worst_tr = max(worst_tr, abs(dev.period_map.trace - monodromy(c, 1.0).trace))
    ok = worst_speed < 1e-4 and worst_k < 1e-3 and worst_tr < 1e-8
    assert record(5, ok, f"22 curves: speed dev {worst_speed:.2g} (< 1e-4), |k~ + k| {worst_k:.2g} (< 1e-3), "
                         f"period-map trace dev {worst_tr:.2g} (< 1e-8)")


# 6 ------------------------------------------------------------------------


def _random_convex_arc(rng):
    n = int(rng.integers(0, 4))
    a = rng.uniform(-0.5, 0.5, n) / max(1, n)
    b = rng.uniform(-0.5, 0.5, n) / max(1, n)
    return tangent_arc(float(rng.uniform(0.2, 6.0)), float(rng.uniform(0.05, np.pi)), a, b)


def test_06_smooth_arm_lemma():
    rng = np.random.default_rng(6)
    violations, worst = 0, -math.inf
    for _ in range(200):
        r = chord_pair(_random_convex_arc(rng), 1.0)
        worst = max(worst, r["d"] - r["d_tilde"])
        violations += r["d"] > r["d_tilde"] + 1e-9
    horo = chord_pair(arc(1.0, math.pi), 1.0)
    horo_err = abs(horo["d_tilde"] - 2 * math.asinh(math.pi / 2))
    ok = violations == 0 and horo_err < 1e-6
    assert record(6, ok, f"200 convex arcs: {violations} violations (max d - d~ = {worst:.3g}); "
                         f"horocycle |d~ - 2 asinh(pi/2)| = {horo_err:.2g} (< 1e-6)")


# 7 ------------------------------------------------------------------------


def test_07_polygonal_convergence():
    ns = [8, 16, 32, 64, 128, 256, 512, 1024]
    res = polygonal_convergence(ellipse(2.0, 1.0), ns)
    e = res["errors"]
    mono = all(y < x for x, y in zip(e, e[1:]))
    ok = mono and e[-1] < 1e-4
    # reported for context only; the criterion is the absolute operator norm
    rel = e[-1] / np.linalg.norm(monodromy(ellipse(2.0, 1.0)).matrix.array, 2)
    assert record(7, ok, f"errors {e[0]:.2g} -> {e[-1]:.2g} (< 1e-4), monotone {mono}, "
                         f"order ~{np.median(res['orders']):.2f} (relative {rel:.2g}; O(n^-2) needs n ~ 3000)")


# 8, 9 -------------------------------------------------------------------------

_SUITES = {}


def _suites():
    if "r" not in _SUITES:
        _SUITES["r"] = theorem_suites(corpus=convex_corpus(500, seed=9), low_curvature=low_curvature_corpus(100, 8))
    return _SUITES["r"]


def test_08_theorem2_suite():
    t2 = _suites()["T2"]
    ok = t2["checked"] == 100 and not t2["violations"]
    assert record(8, ok, f"{t2['checked']} curves with max|k| <= 1 checked, {len(t2['violations'])} violations, "
                         f"{t2['marginal']} marginal")


def test_09_theorem3_and_menzin():
    r = _suites()
    t3, mz = r["T3"], r["Menzin"]
    ok = t3["checked"] >= 500 and not t3["violations"] and not mz["violations"] and mz["checked"] > 0
    assert record(9, ok, f"T3: {t3['checked']} convex curves ({t3['hyperbolic']} hyperbolic), "
                         f"{len(t3['violations'])} with L <= 2 pi; Menzin: {mz['checked']} with area > pi, "
                         f"{len(mz['violations'])} not hyperbolic")


# 10 -----------------------------------------------------------------------


def test_10_fish_reproduction():
    t = time.perf_counter()
    front = fish_front()
    sw = sweep_bike_length(front, 0.5, 2.0, 151)
    tr = sorted(x["ell"] for x in sw.transitions)
    two = len(tr) == 2
    near_gap = two and abs(tr[0] - 0.9272) < 1e-3
    at_one = two and abs(tr[1] - 1.0) < 1e-6
    below = {(r, m) for e, c, r, m in zip(sw.ells, sw.classes, sw.rho, sw.mu) if c == "Hyperbolic" and e < 0.9}
    above = {(r, m) for e, c, r, m in zip(sw.ells, sw.classes, sw.rho, sw.mu) if c == "Hyperbolic" and e > 1}
    regimes = below == {(1, 0)} and above == {(0, 2)}
    residuals = []
    for ell in (0.5, 0.8, 1.0, 1.5, 2.0):
        for bt in closed_back_tracks(front, ell):
            residuals.append(rot_identity_check(front, bt))
    lemma = all(r == 0 for r in residuals)
    err = math.inf
    for bt in closed_back_tracks(front, 1.0):
        g = np.stack([2 * np.cos(bt.ts), np.sin(2 * bt.ts) * np.sin(bt.ts) ** 2], axis=1)
        err = min(err, float(np.max(np.abs(bt.gamma - g))))
    dt = time.perf_counter() - t
    ok = two and near_gap and at_one and regimes and lemma and err < 1e-4 and dt < 60
    assert record(10, ok, f"transitions {[f'{x:.7f}' for x in tr]}; (rho, mu) below {sorted(below)} above "
                          f"{sorted(above)}; identity residuals {set(residuals)}; |gamma - closed form| {err:.2g}; "
                          f"{dt:.1f} s (< 60 s)")


# 11 -----------------------------------------------------------------------


def test_11_length_inequality():
    cases = [(circle(1.0), 1.0), (circle(2.0), 2.0), (circle(0.5), 0.5), (circle(2.0), 1.0), (circle(3.0), 1.5),
             (ellipse(2.0, 1.0), 1.0), (ellipse(1.2, 1.0), 1.0)]
    cases += [(fish_front(), ell) for ell in (0.5, 0.8, 1.0, 1.5, 2.0)]
    cases += [(c, 1.0) for c in convex_corpus(30, seed=11)]
    fails, eq_cases, tracks = [], [], 0
    for c, ell in cases:
        for bt in closed_back_tracks(c, ell):
            tracks += 1
            r = length_bound_check(c, bt, ell)
            if not r["ok"]:
                fails.append((c.label, ell))
            if r["equality"]:
                eq_cases.append((c.label, ell))
    expect_eq = {("circle:r=1", 1.0), ("circle:r=2", 2.0), ("circle:r=0.5", 0.5)}
    ok = not fails and set(eq_cases) == expect_eq
    assert record(11, ok, f"{tracks} back tracks, {len(fails)} violations; equality on {sorted(set(eq_cases))}")


# 12 -----------------------------------------------------------------------


def test_12_conjecture_harness():
    rep = conjecture_harness(convex_corpus(50, seed=12), ells=(0.1, 3.0, 30))
    records_ok = all("curve" in ce and "cells" in ce for ce in rep["C1"] + rep["C2"])
    ok = rep["curves"] == 50 and rep["counterexamples"] == 0 and records_ok
    assert record(12, ok, f"{rep['curves']} strictly convex curves, {len(rep['C1'])} C1 and {len(rep['C2'])} C2 "
                          f"counterexamples, {rep['excluded_cells']} excluded cells")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
