"""Independent reference computations for the test suite.

Nothing here imports the package's numerical code: maps are re-typed from
their defining formulas, derivatives come from central differences at 40
significant digits, and graph counts use a plain breadth-first search.
"""

from collections import deque

import mpmath
import numpy as np

LD = np.longdouble


# ---------------------------------------------------------------- scalar maps

def scalar_map(family, p, exp=np.exp):
    """H(u) for a scalar family, written out from the model definitions."""
    if family == "sigmoid-bh":
        return lambda u: p["r"] * u ** p["delta"] / (1 + u ** p["delta"])
    if family == "scaled-bh":
        return lambda u: p["r"] * u ** p["delta"] / (p["a"] + u ** p["delta"])
    if family == "elaydi-sacker":
        return lambda u: u * (p["d"] * u + p["e"]) / (u * u + p["b"] * u + p["c"])
    if family == "ricker-allee":
        return lambda u: u * exp(p["r"] * (1 - u) - p["m"] / (1 + p["b"] * u))
    if family == "mss":
        return lambda u: p["r"] * u ** p["delta"] / (1 + u ** p["delta"] + p["b"] * u ** p["d"])
    raise KeyError(family)


def planar_map(family, p, exp=np.exp):
    """(x, y) -> (x', y') for a planar family."""
    if family == "symmetric-bh":
        family = "general-bh"
        p = dict(r1=p["r"], r2=p["r"], b1=p["b"], b2=p["b"], delta1=p["delta"],
                 delta2=p["delta"], delta3=p["d"], delta4=p["d"])
    if family == "general-bh":
        def T(x, y):
            return (p["r1"] * x ** p["delta1"] / (1 + x ** p["delta1"] + p["b1"] * y ** p["delta3"]),
                    p["r2"] * y ** p["delta2"] / (1 + y ** p["delta2"] + p["b2"] * x ** p["delta4"]))
        return T
    if family == "scramble-mating":
        r, a, b = p["r"], p["a"], p["b"]

        def T(x, y):
            return (x * exp(r * (1 - x) - a * y) * b * x / (1 + b * x),
                    y * exp(r * (1 - y) - a * x) * b * y / (1 + b * y))
        return T
    if family == "scramble-predation":
        r, a, m, b = p["r"], p["a"], p["m"], p["b"]

        def T(x, y):
            return (x * exp(r * (1 - x) - a * y - m / (1 + b * x)),
                    y * exp(r * (1 - y) - a * x - m / (1 + b * y)))
        return T
    raise KeyError(family)


def _ld_params(p):
    return {k: LD(v) for k, v in p.items()}


# ------------------------------------------------------- finite differences
# Off-diagonal Jacobian entries can be 1e-15 of the image they perturb, so
# double or long double differences cancel away; mpmath keeps 40 digits.

DPS = 40


def _mp_params(p):
    return {k: mpmath.mpf(v) for k, v in p.items()}


def fd_derivative(family, p, u, rel=1e-12):
    """Central difference of H at u."""
    with mpmath.workdps(DPS):
        H = scalar_map(family, _mp_params(p), exp=mpmath.exp)
        u = mpmath.mpf(u)
        h = rel * u
        return float((H(u + h) - H(u - h)) / (2 * h))


def fd_jacobian(family, p, x, y, rel=1e-12):
    """Central-difference Jacobian."""
    with mpmath.workdps(DPS):
        T = planar_map(family, _mp_params(p), exp=mpmath.exp)
        x, y = mpmath.mpf(x), mpmath.mpf(y)
        hx, hy = rel * x, rel * y
        J = np.empty((2, 2))
        for i in range(2):
            J[i, 0] = float((T(x + hx, y)[i] - T(x - hx, y)[i]) / (2 * hx))
            J[i, 1] = float((T(x, y + hy)[i] - T(x, y - hy)[i]) / (2 * hy))
        return J


# ---------------------------------------------------- nullcline intersection

def _radicand_root(r, d, level, lo, hi):
    """x in [lo, hi] with r x^(d-1) - x^d - 1 = level, by plain bisection."""
    g = lambda x: r * x ** (d - 1) - x ** d - 1 - level
    glo = g(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (g(mid) > 0) == (glo > 0):
            lo, glo = mid, g(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def nullcline_crossings(r1, r2, b1, b2, d1, d2, d3, d4, n=200_000):
    """Interior fixed points of the general Beverton-Holt map found by
    scanning G(x) = F2(F1(x)) - x.

    G only exists where F1(x) lies in (A2, K2); those x-intervals are found
    first and each is scanned with a grid clustered at both ends, since G
    starts and ends negative there and crossings come in pairs.
    """
    def F1(x):
        return np.maximum((r1 * x ** (d1 - 1) - x ** d1 - 1) / b1, 0.0) ** (1 / d3)

    def F2(y):
        return np.maximum((r2 * y ** (d2 - 1) - y ** d2 - 1) / b2, 0.0) ** (1 / d4)

    xc = r1 * (d1 - 1) / d1
    yc = r2 * (d2 - 1) / d2
    top1 = r1 * xc ** (d1 - 1) - xc ** d1 - 1
    top2 = r2 * yc ** (d2 - 1) - yc ** d2 - 1
    if top1 <= 0 or top2 <= 0:
        return []
    # axis thresholds and capacities: the zero level on each side of the hump
    A1 = _radicand_root(r1, d1, 0.0, 1e-12, xc)
    K1 = _radicand_root(r1, d1, 0.0, xc, r1)
    A2 = _radicand_root(r2, d2, 0.0, 1e-12, yc)
    K2 = _radicand_root(r2, d2, 0.0, yc, r2)

    # x where F1(x) equals A2 or K2, i.e. the radicand equals b1 * level^d3
    cuts = [A1, K1]
    for level in (A2, K2):
        v = b1 * level ** d3
        if v < top1:
            cuts += [_radicand_root(r1, d1, v, A1, xc), _radicand_root(r1, d1, v, xc, K1)]
    cuts = sorted(cuts)

    points = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = 0.5 * (lo + hi)
        if not A2 < F1(mid) < K2:
            continue
        t = np.linspace(0.0, np.pi, n + 1)
        xs = lo + (hi - lo) * 0.5 * (1 - np.cos(t))
        G = F2(F1(xs)) - xs
        # F2 vanishes at the cuts, so G = -x exactly there; roots can hug a cut
        G[0], G[-1] = -lo, -hi
        idx = np.flatnonzero(np.sign(G[:-1]) * np.sign(G[1:]) < 0)
        for i in idx:
            a, b = xs[i], xs[i + 1]
            ga = G[i]
            for _ in range(200):
                m = 0.5 * (a + b)
                gm = F2(F1(m)) - m
                if (gm > 0) == (ga > 0):
                    a, ga = m, gm
                else:
                    b = m
            x = 0.5 * (a + b)
            points.append((float(x), float(F1(x))))
    return sorted(points)


# --------------------------------------------------------------- components

def bfs_components(mask):
    """Number of 4-connected components of True cells."""
    mask = np.asarray(mask, dtype=bool)
    seen = np.zeros_like(mask)
    nx, ny = mask.shape
    count = 0
    for i in range(nx):
        for j in range(ny):
            if not mask[i, j] or seen[i, j]:
                continue
            count += 1
            queue = deque([(i, j)])
            seen[i, j] = True
            while queue:
                a, b = queue.popleft()
                for c, d in ((a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)):
                    if 0 <= c < nx and 0 <= d < ny and mask[c, d] and not seen[c, d]:
                        seen[c, d] = True
                        queue.append((c, d))
    return count


# ------------------------------------------------------------ basin oracle

def basin_labels(family, p, attractors, window, resolution, steps=5000, radius=1e-6):
    """Whole-grid long-double iteration; cell centres are labelled by the
    index of the attractor their final state lies within ``radius`` of, or
    -1.  ``labels[i, j]`` has x index i and y index j."""
    T = planar_map(family, _ld_params(p))
    x0, x1, y0, y1 = window
    nx, ny = resolution
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    X, Y = np.meshgrid(xs.astype(LD), ys.astype(LD), indexing="ij")
    with np.errstate(all="ignore"):
        for _ in range(steps):
            X, Y = T(X, Y)
    labels = np.full((nx, ny), -1)
    for k, (ax, ay) in enumerate(attractors):
        near = np.hypot((X - LD(ax)).astype(float), (Y - LD(ay)).astype(float)) < radius
        labels[near] = k
    return labels
