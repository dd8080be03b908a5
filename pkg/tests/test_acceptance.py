"""Acceptance criteria 1-9, each at its stated tolerance and time budget.
The terminal summary prints one PASS/FAIL line per criterion."""

import math
import os
import statistics
import subprocess
import sys
import textwrap
import time

import numpy as np
import pytest

from alleedyn.basins import AttractorKind, basin_grid, build_registry, component_count, touches_far_edge
from alleedyn.numerics import cycle_detect, lyapunov_1d
from alleedyn.planar import PlanarMap, interior_equilibria, jacobian, nullclines
from alleedyn.scalar import (ScalarModel, asymptotic_class, critical_r, find_equilibria_scalar,
                             simulate_scalar)
from alleedyn.suites import containment_suite, thm3_suite, thm7_suite

import oracles

FIGURES = {5: 15.0, 7: 0.05, 9: 0.01}


def _elapsed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_scalar_closed_forms():
    r, delta = 2.5, 2.0
    m = ScalarModel.sigmoid_bh(r, delta)
    A = (r - math.sqrt(r * r - 4)) / 2
    K = (r + math.sqrt(r * r - 4)) / 2
    find_equilibria_scalar(m)
    times = []
    for _ in range(50):
        eq, dt = _elapsed(lambda: find_equilibria_scalar(m))
        times.append(dt)
    np.testing.assert_allclose(eq.values, [0.0, A, K], rtol=0, atol=1e-10)
    assert statistics.median(times) < 1e-3, f"median runtime {statistics.median(times):.2e} s"


def test_criterion_2_critical_thresholds():
    assert critical_r(ScalarModel.sigmoid_bh(1.0, 2.0)) == 2.0
    rng = np.random.default_rng(2)

    def run():
        checked, bad = 0, []
        for _ in range(100):
            delta, a = rng.uniform(1, 6), rng.uniform(1, 10)
            rc_a = critical_r(ScalarModel.scaled_bh(1.0, a, delta))
            r = rng.uniform(0.5 * rc_a, 3 * rc_a)
            if not r > rc_a:
                continue
            checked += 1
            base = find_equilibria_scalar(ScalarModel.sigmoid_bh(r, delta)).positive
            scaled = find_equilibria_scalar(ScalarModel.scaled_bh(r, a, delta)).positive
            vals = [base[0].value, scaled[0].value, scaled[-1].value, base[-1].value]
            if not (len(base) == 2 and len(scaled) == 2 and vals[0] < vals[1] < vals[2] < vals[3]):
                bad.append((delta, a, r, vals))
        return checked, bad

    (checked, bad), dt = _elapsed(run)
    assert checked > 50
    assert not bad, bad[:3]
    assert dt < 1.0, f"runtime {dt:.2f} s"


def test_criterion_3_interior_counts():
    expected = {5: 0, 7: 2, 9: 4}
    maps = {k: PlanarMap.general_bh(2.5, 2.5, b, b, 2, 2, 5, 5) for k, b in FIGURES.items()}

    def run():
        return ({k: interior_equilibria(m).interior for k, m in maps.items()},
                nullclines(maps[9]))

    (found, na9), dt = _elapsed(run)
    for k, b in FIGURES.items():
        brute = oracles.nullcline_crossings(2.5, 2.5, b, b, 2, 2, 5, 5)
        assert len(brute) == expected[k]
        assert len(found[k]) == expected[k], (k, found[k])
        np.testing.assert_allclose(sorted((e.x, e.y) for e in found[k]), brute, atol=1e-8)
    K1 = K2 = (2.5 + math.sqrt(2.5 ** 2 - 4)) / 2
    assert na9.F1_at_xc > K2 and na9.F2_at_yc > K1
    assert dt < 1.0, f"runtime {dt:.2f} s"


def _speedup(threads=8):
    script = textwrap.dedent(f"""
        import time
        from alleedyn.basins import basin_grid, build_registry
        from alleedyn.planar import PlanarMap
        m = PlanarMap.symmetric_bh(2.5, 0.01, 2, 5)
        reg = build_registry(m)
        basin_grid(m, reg, resolution=(20, 20), threads=1)
        out = []
        for n in (1, {threads}):
            t0 = time.perf_counter()
            basin_grid(m, reg, resolution=(200, 200), threads=n)
            out.append(time.perf_counter() - t0)
        print(out[0] / out[1])
    """)
    env = dict(os.environ, NUMBA_NUM_THREADS=str(threads))
    res = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True,
                         timeout=600)
    assert res.returncode == 0, res.stderr
    return float(res.stdout.strip().splitlines()[-1])


def test_criterion_4_basin_topology():
    expected = {
        5: ({"BoundaryE0", "BoundaryExK", "BoundaryEyK"}, 1),
        7: ({"BoundaryE0", "BoundaryExK", "BoundaryEyK"}, 2),
        9: ({"BoundaryE0", "BoundaryExK", "BoundaryEyK", "Interior"}, 2),
    }
    problems = []
    total = 0.0
    for fig, b in FIGURES.items():
        m = PlanarMap.symmetric_bh(2.5, b, 2, 5)
        raster, dt = _elapsed(lambda: basin_grid(m, build_registry(m), (0, 4, 0, 4), (200, 200),
                                                 (5000, None), threads=1))
        total += dt
        kinds = {k.value for k in raster.kind_set()}
        want_kinds, want_e0 = expected[fig]
        if kinds != want_kinds:
            problems.append(f"fig {fig + 1}: labels {sorted(kinds)}")
        e0 = raster.registry.find(AttractorKind.E0)
        n_e0 = component_count(raster, e0)
        if n_e0 != want_e0:
            problems.append(f"fig {fig + 1}: E0 components {n_e0} != {want_e0}")
        if raster.undetermined_fraction() >= 0.01:
            problems.append(f"fig {fig + 1}: undetermined {raster.undetermined_fraction():.4f}")
        if fig == 9:
            inner = raster.registry.find(AttractorKind.INTERIOR)
            if component_count(raster, inner) != 1:
                problems.append(f"fig 10: interior components {component_count(raster, inner)}")
            if touches_far_edge(raster, inner):
                problems.append("fig 10: interior basin touches x=4 or y=4")
    if total >= 60:
        problems.append(f"single-thread runtime {total:.1f} s")
    speedup = _speedup(8)
    if speedup < 0.75 * 8:
        problems.append(f"8-thread speedup {speedup:.2f} (cpu count {os.cpu_count()})")
    assert not problems, "; ".join(problems)


def test_criterion_5_thm3_suite():
    rep, dt = _elapsed(lambda: thm3_suite(seed=0, draws=200, orbits=50, steps=5000))
    assert rep["samples"] == 200 * 50
    assert not rep["violations"], rep["violations"][:3]
    assert dt < 120, f"runtime {dt:.1f} s"


def test_criterion_6_containment_suite():
    rep, dt = _elapsed(lambda: containment_suite(seed=0, extra_draws=20, samples=10_000, steps=5000))
    assert rep["draws"] == 23
    assert all(r["samples"] == 10_000 for r in rep["regions"])
    assert not rep["violations"], rep["violations"][:3]
    assert dt < 120, f"runtime {dt:.1f} s"


def test_criterion_7_thm7_spectral():
    rep = thm7_suite(seed=0, draws=100, tol=1e-8)
    assert rep["samples"] >= 100
    assert not rep["violations"], rep["violations"][:3]


def test_criterion_8_mss_regimes():
    def run():
        out = {}
        for r in (7.5, 25.0):
            m = ScalarModel.mss(r, 2, 0.1, 5)
            traj = simulate_scalar(m, 1.0, 2000)
            out[r] = (asymptotic_class(traj, find_equilibria_scalar(m)),
                      cycle_detect(traj.values[-256:], 1e-6, 64),
                      lyapunov_1d(m, 1.0, 2000).exponent)
        return out

    out, dt = _elapsed(run)
    verdict, period, lyap = out[7.5]
    assert verdict.kind == "Cycle" and period is not None and period >= 2
    assert lyap < 0
    verdict, period, lyap = out[25.0]
    assert period is None and verdict.kind == "Aperiodic"
    assert lyap > 0
    assert dt < 5.0, f"runtime {dt:.2f} s"


def _scalar_draw(family, rng):
    u = rng.uniform
    if family == "sigmoid-bh":
        return {"r": u(0.5, 5), "delta": u(0.3, 6)}
    if family == "scaled-bh":
        return {"r": u(0.5, 5), "a": u(0.2, 10), "delta": u(0.3, 6)}
    if family == "elaydi-sacker":
        return {"d": u(0, 5), "e": u(0, 5), "b": u(0, 5), "c": u(0.1, 5)}
    if family == "ricker-allee":
        return {"r": u(0.1, 3), "m": u(0, 3), "b": u(0, 10)}
    return {"r": u(0.5, 30), "delta": u(0.5, 5), "b": u(0.01, 1), "d": u(0.5, 8)}


def _planar_draw(family, rng):
    u = rng.uniform
    if family == "general-bh":
        return dict(r1=u(0.5, 5), r2=u(0.5, 5), b1=u(0.01, 5), b2=u(0.01, 5),
                    delta1=u(0.5, 5), delta2=u(0.5, 5), delta3=u(0.5, 5), delta4=u(0.5, 5))
    if family == "symmetric-bh":
        return dict(r=u(0.5, 5), b=u(0.01, 5), delta=u(0.5, 5), d=u(0.5, 8))
    if family == "scramble-mating":
        return dict(r=u(0.1, 3), a=u(0.05, 2), b=u(0.1, 10))
    return dict(r=u(0.1, 3), a=u(0.05, 2), m=u(0.1, 3), b=u(0.1, 10))


def test_criterion_9_derivative_oracle():
    rng = np.random.default_rng(9)
    scalar = ["sigmoid-bh", "scaled-bh", "elaydi-sacker", "ricker-allee", "mss"]
    planar = ["general-bh", "symmetric-bh", "scramble-mating", "scramble-predation"]
    per_family = math.ceil(10_000 / (len(scalar) + len(planar)))
    points = 0
    for family in scalar:
        for _ in range(per_family):
            p = _scalar_draw(family, rng)
            x = rng.uniform(0.01, 5)
            got = ScalarModel(family, p).derivative(x)
            ref = oracles.fd_derivative(family, p, x)
            np.testing.assert_allclose(got, ref, rtol=1e-6, atol=0, err_msg=f"{family} {p} u={x}")
            points += 1
    for family in planar:
        for _ in range(per_family):
            p = _planar_draw(family, rng)
            x, y = rng.uniform(0.01, 4, 2)
            got = jacobian(PlanarMap(family, p), (x, y))
            ref = oracles.fd_jacobian(family, p, x, y)
            np.testing.assert_allclose(got, ref, rtol=1e-6, atol=0,
                                       err_msg=f"{family} {p} at ({x}, {y})")
            points += 1
    assert points >= 10_000
