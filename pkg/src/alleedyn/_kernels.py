"""Compiled orbit kernels for raster classification and batch iteration.

Every kernel takes a family code and a parameter vector (see
``PlanarMap.kernel_args``).  Cells are independent, so results do not depend
on thread scheduling.
"""

import math
import warnings

import numba
import numpy as np
from numba import njit, prange


@njit(cache=True, inline="always")
def _step(code, p, x, y):
    if code == 0:
        xd = x ** p[4]
        yd = y ** p[5]
        return (p[0] * xd / (1.0 + xd + p[2] * y ** p[6]),
                p[1] * yd / (1.0 + yd + p[3] * x ** p[7]))
    if code == 1:
        r, a, b = p[0], p[1], p[2]
        return (x * math.exp(r * (1.0 - x) - a * y) * (b * x / (1.0 + b * x)),
                y * math.exp(r * (1.0 - y) - a * x) * (b * y / (1.0 + b * y)))
    r, a, m, b = p[0], p[1], p[2], p[3]
    return (x * math.exp(r * (1.0 - x) - a * y - m / (1.0 + b * x)),
            y * math.exp(r * (1.0 - y) - a * x - m / (1.0 + b * y)))


@njit(cache=True, inline="always")
def _match(x, y, pts, ids, radii):
    for k in range(pts.shape[0]):
        dx = x - pts[k, 0]
        dy = y - pts[k, 1]
        if dx * dx + dy * dy <= radii[k] * radii[k]:
            return ids[k]
    return -1


@njit(cache=True, parallel=True)
def classify_points(code, p, xs, ys, pts, ids, radii, max_steps, confirm, labels, steps):
    """Label each start by the first registry id whose ball holds the orbit
    for ``confirm`` consecutive iterates; -1 after ``max_steps``."""
    for i in prange(xs.shape[0]):
        x = xs[i]
        y = ys[i]
        cur = -1
        run = 0
        label = -1
        used = max_steps
        for t in range(max_steps + 1):
            hit = _match(x, y, pts, ids, radii)
            if hit >= 0 and hit == cur:
                run += 1
            else:
                cur = hit
                run = 1 if hit >= 0 else 0
            if run >= confirm:
                label = cur
                used = t
                break
            if t == max_steps:
                break
            x, y = _step(code, p, x, y)
            if not (math.isfinite(x) and math.isfinite(y)):
                used = t
                break
        labels[i] = label
        steps[i] = used


@njit(cache=True, parallel=True)
def reach_target(code, p, xs, ys, mode, tx, ty, tol, max_steps, confirm, ok, final):
    """Whether each orbit comes within ``tol`` of the target and stays for
    ``confirm`` iterates.  ``mode`` 0: distance to (tx, ty); 1: |x|; 2: |y|."""
    for i in prange(xs.shape[0]):
        x = xs[i]
        y = ys[i]
        run = 0
        hit = False
        for t in range(max_steps + 1):
            if mode == 0:
                d = math.sqrt((x - tx) ** 2 + (y - ty) ** 2)
            elif mode == 1:
                d = abs(x)
            else:
                d = abs(y)
            if d < tol:
                run += 1
                if run >= confirm:
                    hit = True
                    break
            else:
                run = 0
            if t == max_steps:
                break
            x, y = _step(code, p, x, y)
        ok[i] = hit
        final[i, 0] = x
        final[i, 1] = y


@njit(cache=True, parallel=True)
def orbit_tails(code, p, xs, ys, steps, keep, out):
    """Last ``keep`` states of each ``steps``-step orbit into ``out[i]``."""
    start = steps + 1 - keep
    for i in prange(xs.shape[0]):
        x = xs[i]
        y = ys[i]
        for t in range(steps + 1):
            if t >= start:
                out[i, t - start, 0] = x
                out[i, t - start, 1] = y
            x, y = _step(code, p, x, y)


@njit(cache=True)
def orbit(code, p, x, y, steps):
    out = np.empty((steps + 1, 2))
    for t in range(steps + 1):
        out[t, 0] = x
        out[t, 1] = y
        x, y = _step(code, p, x, y)
    return out


def max_threads():
    return numba.config.NUMBA_NUM_THREADS


def set_threads(n):
    """Set the kernel thread count, clamped to what the runtime allows.
    Returns the count actually in effect."""
    if n is None:
        return numba.get_num_threads()
    n = int(n)
    limit = max_threads()
    if n < 1:
        raise ValueError("thread count must be >= 1")
    if n > limit:
        warnings.warn(f"requested {n} threads, runtime allows {limit}", RuntimeWarning, stacklevel=2)
        n = limit
    numba.set_num_threads(n)
    return n
