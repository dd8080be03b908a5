"""Randomized property suites: the convergence, basin, interior-count and
symmetric-stability theorems as executable checks.  Each suite returns a
plain dict report with the number of samples and the list of violations."""

import math

import numpy as np

from . import _kernels
from .basins import Region, region_spec, verify_containment
from .errors import HypothesisError, PreconditionError
from .planar import (PlanarMap, PredictedCount, equilibria, jacobian, nullclines,
                     symmetric_stability)
from .scalar import ScalarModel, asymptotic_class, critical_r, find_equilibria_scalar

FIGURE_PARAMS = {"fig5": 15.0, "fig7": 0.05, "fig9": 0.01}

PRED_COUNTS = {PredictedCount.ZERO: 0, PredictedCount.TWO: 2, PredictedCount.FOUR: 4}


def figure_map(name):
    return PlanarMap.general_bh(2.5, 2.5, FIGURE_PARAMS[name], FIGURE_PARAMS[name], 2, 2, 5, 5)


def _loguniform(rng, lo, hi):
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def _rate(rng, delta, lo=1.1, hi=2.0):
    return critical_r(ScalarModel.sigmoid_bh(1.0, delta)) * rng.uniform(lo, hi)


def draw_competitive(rng):
    """H1 map with d1 d2 >= d3 d4."""
    d1, d2 = rng.uniform(1.2, 4.0, 2)
    d3 = rng.uniform(0.5, 4.0)
    ceiling = d1 * d2 / d3
    d4 = rng.uniform(0.3 * ceiling, ceiling)
    return PlanarMap.general_bh(_rate(rng, d1), _rate(rng, d2), _loguniform(rng, 1e-2, 10),
                                _loguniform(rng, 1e-2, 10), d1, d2, d3, d4)


def draw_bounded_growth(rng):
    """H1 map with d1 d2 < d3 d4 and r1 below its convergence bound."""
    d1, d2 = rng.uniform(1.2, 3.0, 2)
    d3 = rng.uniform(1.0, 6.0)
    d4 = rng.uniform(d1 * d2 / d3 * 1.1, d1 * d2 / d3 * 3.0)
    r1, r2 = _rate(rng, d1), _rate(rng, d2)
    intra, inter = d1 * d2, d3 * d4
    b2 = rng.uniform(0.1, 0.9) * intra / ((inter - intra) * r1 ** d4)
    return PlanarMap.general_bh(r1, r2, _loguniform(rng, 1e-2, 10), b2, d1, d2, d3, d4)


def draw_h1(rng):
    d1, d2 = rng.uniform(1.2, 3.0, 2)
    d3, d4 = rng.uniform(1.0, 6.0, 2)
    return PlanarMap.general_bh(_rate(rng, d1), _rate(rng, d2), _loguniform(rng, 1e-2, 10),
                                _loguniform(rng, 1e-2, 10), d1, d2, d3, d4)


def draw_symmetric(rng):
    """SymmetricBH map whose diagonal MSS map has a strong Allee effect."""
    delta = rng.uniform(1.2, 3.0)
    d = rng.uniform(delta + 0.5, 8.0)
    b = _loguniform(rng, 1e-3, 1.0)
    rc = critical_r(ScalarModel.mss(1.0, delta, b, d))
    return PlanarMap.symmetric_bh(rc * rng.uniform(1.05, 3.0), b, delta, d)


def _record(m):
    return m.to_record()


def convergence_suite(draw, theorem, seed=0, draws=200, orbits=50, steps=5000, threads=None):
    """Every sampled orbit must end on a located equilibrium."""
    rng = np.random.default_rng(seed)
    _kernels.set_threads(threads)
    keep = 256
    violations, samples = [], 0
    for _ in range(draws):
        m = draw(rng)
        points = equilibria(m).points()
        r1, r2 = m.bh_params()[:2]
        xs = rng.uniform(0, 1.5 * r1, orbits)
        ys = rng.uniform(0, 1.5 * r2, orbits)
        code, p = m.kernel_args()
        tails = np.empty((orbits, keep, 2))
        _kernels.orbit_tails(code, p, xs, ys, steps, keep, tails)
        for k in range(orbits):
            samples += 1
            verdict = asymptotic_class(tails[k], points)
            if verdict.kind != "FixedPoint":
                violations.append({"params": _record(m), "start": [xs[k], ys[k]],
                                   "verdict": verdict.kind, "final": tails[k, -1].tolist()})
    return {"theorem": theorem, "draws": draws, "samples": samples, "violations": violations}


def thm3_suite(seed=0, draws=200, orbits=50, steps=5000, threads=None):
    return convergence_suite(draw_competitive, "thm3", seed, draws, orbits, steps, threads)


def thm5_convergence_suite(seed=0, draws=50, orbits=50, steps=5000, threads=None):
    return convergence_suite(draw_bounded_growth, "thm5-convergence", seed, draws, orbits, steps,
                             threads)


def containment_suite(seed=0, extra_draws=20, samples=10_000, steps=5000, threads=None,
                      lobe="derived"):
    """Sampled points of every applicable region reach the asserted limit;
    figure parameters first, then random H1 draws."""
    rng = np.random.default_rng(seed)
    maps = [(name, figure_map(name)) for name in FIGURE_PARAMS]
    maps += [(f"draw{i}", draw_h1(rng)) for i in range(extra_draws)]
    regions, violations, total, skipped = [], [], 0, []
    for name, m in maps:
        for region in Region:
            try:
                spec = region_spec(m, region, lobe=lobe)
            except HypothesisError as exc:
                skipped.append({"map": name, "region": region.value, "condition": exc.condition})
                continue
            rep = verify_containment(m, spec, samples=samples, seed=int(rng.integers(2 ** 32)),
                                     max_steps=steps, threads=threads)
            total += rep.samples
            regions.append({"map": name, "region": rep.region, "target": rep.target,
                            "samples": rep.samples, "violations": len(rep.violations)})
            for v in rep.violations:
                violations.append(dict(v, map=name, region=rep.region, params=_record(m)))
            if rep.samples < samples:
                violations.append({"map": name, "region": rep.region,
                                   "error": f"only {rep.samples} points sampled"})
    return {"theorem": "thm4-thm5-containment", "lobe": lobe, "draws": len(maps), "samples": total,
            "regions": regions, "skipped": skipped, "violations": violations}


def thm6_suite(seed=0, draws=100, max_tries=5000):
    """Draws where one of the sufficient conditions holds: the located
    interior count equals the predicted 0, 2 or 4."""
    rng = np.random.default_rng(seed)
    checked, violations, tries = 0, [], 0
    counts = {"Zero": 0, "Two": 0, "Four": 0}
    while checked < draws and tries < max_tries:
        tries += 1
        m = draw_h1(rng)
        na = nullclines(m)
        if na.predicted_count not in PRED_COUNTS:
            continue
        checked += 1
        counts[na.predicted_count.value] += 1
        if len(na.located) != PRED_COUNTS[na.predicted_count] or na.ambiguous:
            violations.append({"params": _record(m), "predicted": na.predicted_count.value,
                               "located": len(na.located), "ambiguous": na.ambiguous})
    return {"theorem": "thm6", "draws": checked, "samples": checked, "cases": counts,
            "violations": violations}


def thm7_suite(seed=0, draws=100, tol=1e-8):
    """Formula eigenvalues at symmetric fixed points match the Jacobian's,
    and the transverse one is positive."""
    rng = np.random.default_rng(seed)
    violations, samples = [], 0
    for _ in range(draws):
        m = draw_symmetric(rng)
        p = m.params
        diag = find_equilibria_scalar(ScalarModel.mss(p["r"], p["delta"], p["b"], p["d"]))
        for root in diag.positive:
            x = root.value
            samples += 1
            try:
                l1, l2, verdict = symmetric_stability(m, x)
            except PreconditionError as exc:
                violations.append({"params": _record(m), "x": x, "error": str(exc)})
                continue
            eig = np.sort(np.linalg.eigvals(jacobian(m, (x, x))).real)
            formula = np.sort([l1, l2])
            err = float(np.max(np.abs(eig - formula)))
            if err > tol or not l2 > 0:
                violations.append({"params": _record(m), "x": x, "error": err, "lambda2": l2})
    return {"theorem": "thm7", "draws": draws, "samples": samples, "violations": violations}


SUITES = {
    "thm3": thm3_suite,
    "thm5-convergence": thm5_convergence_suite,
    "containment": containment_suite,
    "thm6": thm6_suite,
    "thm7": thm7_suite,
}
