"""Root bracketing and refinement, cycle detection, sign-rule bounds and
Lyapunov estimates shared by the scalar and planar modules."""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    @property
    def degenerate(self):
        return self.lo == self.hi


class Root(NamedTuple):
    value: float
    residual: float
    iterations: int
    converged: bool


class LyapunovEstimate(NamedTuple):
    exponent: float
    samples: int
    skipped: int


def _evaluate(f, grid):
    # vectorized callables are the common case; fall back to a loop otherwise
    try:
        values = np.asarray(f(grid), dtype=float)
        if values.shape == grid.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([f(float(u)) for u in grid], dtype=float)


def bracket_scan(f: Callable, interval, n_subdivisions: int = 4096, grid=None):
    """Split ``interval`` into ``n_subdivisions`` cells and return one
    :class:`Bracket` per sign change of ``f``.

    Grid points where ``f`` is exactly zero come back as degenerate brackets
    (``lo == hi``).  Cells touching a non-finite value are skipped and counted
    in a ``RuntimeWarning``.  A precomputed ``grid`` may replace the uniform one.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if grid is None:
        if n_subdivisions < 2:
            raise ValueError("n_subdivisions must be >= 2")
        if not hi > lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        grid = np.linspace(lo, hi, n_subdivisions + 1)
    else:
        grid = np.asarray(grid, dtype=float)
    with np.errstate(all="ignore"):
        values = _evaluate(f, grid)

    finite = np.isfinite(values)
    brackets = []
    for i in np.flatnonzero(finite & (values == 0.0)):
        brackets.append(Bracket(grid[i], grid[i], 0.0, 0.0))

    left, right = values[:-1], values[1:]
    ok = finite[:-1] & finite[1:]
    skipped = int(np.count_nonzero(~ok))
    change = ok & (left * right < 0.0)
    for i in np.flatnonzero(change):
        brackets.append(Bracket(grid[i], grid[i + 1], left[i], right[i]))
    if skipped:
        warnings.warn(f"bracket_scan skipped {skipped} cells with non-finite values",
                      RuntimeWarning, stacklevel=2)
    brackets.sort(key=lambda b: b.lo)
    return brackets


def _central_slope(f, u, fu=None):
    h = 1e-7 * max(1.0, abs(u))
    return (f(u + h) - f(u - h)) / (2.0 * h)


def refine_root(f: Callable, bracket: Bracket, tol: float = 1e-14, max_iter: int = 200,
                fprime: Optional[Callable] = None, xtol: Optional[float] = None) -> Root:
    """Safeguarded Newton iteration inside a sign-change bracket.

    Newton steps that leave the current bracket, or fail to halve it, are
    replaced by bisection, so the iterate always stays inside ``bracket``.
    Stops when ``|f| <= tol`` or the bracket is narrower than ``xtol``
    (default ``tol``, scaled by the root magnitude when it exceeds one).
    """
    if bracket.degenerate:
        return Root(bracket.lo, 0.0, 0, True)
    a, b = bracket.lo, bracket.hi
    fa, fb = bracket.f_lo, bracket.f_hi
    if fa * fb > 0:
        raise ValueError("bracket does not enclose a sign change")
    slope = fprime if fprime is not None else (lambda u: _central_slope(f, u))
    xtol = tol if xtol is None else xtol

    x = 0.5 * (a + b)
    fx = f(x)
    prev_width = b - a
    for it in range(1, max_iter + 1):
        if fx == 0.0 or abs(fx) <= tol:
            return Root(x, abs(fx), it, True)
        if fa * fx < 0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        width = b - a
        if width <= xtol * max(1.0, abs(x)):
            best = a if abs(fa) < abs(fb) else b
            return Root(best, min(abs(fa), abs(fb)), it, True)

        d = slope(x)
        candidate = x - fx / d if d != 0 and math.isfinite(d) else math.nan
        if not (a < candidate < b) or width > 0.5 * prev_width:
            candidate = 0.5 * (a + b)
        prev_width = width
        x = candidate
        fx = f(x)

    return Root(x, abs(fx), max_iter, False)


def chebyshev_grid(lo, hi, n):
    """``n + 1`` nodes on ``[lo, hi]`` clustered quadratically at both ends."""
    t = np.linspace(0.0, np.pi, n + 1)
    grid = lo + (hi - lo) * 0.5 * (1.0 - np.cos(t))
    grid[0], grid[-1] = lo, hi
    return grid


def descartes_bound(coefficients: Sequence[float]) -> int:
    """Number of sign changes among the nonzero coefficients, listed from the
    highest exponent down.  Upper bound on the count of positive roots."""
    signs = [c > 0 for c in coefficients if c != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def cycle_detect(tail, tol: float, max_period: int) -> Optional[int]:
    """Minimal ``p <= max_period`` with ``|u[t+p] - u[t]| <= tol`` across the
    whole tail, or ``None``.  Accepts scalar or vector-valued samples."""
    tail = np.asarray(tail, dtype=float)
    if len(tail) < 4 * max_period:
        raise ValueError(f"tail of length {len(tail)} is shorter than 4*max_period")
    if not np.all(np.isfinite(tail)):
        return None
    for p in range(1, max_period + 1):
        diff = np.abs(tail[p:] - tail[:-p])
        if diff.size and np.max(diff) <= tol:
            return p
    return None


def lyapunov_1d(model, u0: float, T: int, burn_in: Optional[int] = None) -> LyapunovEstimate:
    """Mean of ``ln|H'(u_t)|`` over the orbit of ``u0`` after ``burn_in`` steps.

    ``model`` needs ``step`` and ``derivative``.  Samples where ``H'`` is zero
    are skipped and counted.
    """
    if burn_in is None:
        burn_in = T // 10
    if T < 10 * burn_in:
        raise ValueError("T must be at least 10 * burn_in")
    u = float(u0)
    total, used, skipped = 0.0, 0, 0
    for t in range(T):
        if t >= burn_in:
            slope = abs(float(model.derivative(u)))
            if slope == 0.0 or not math.isfinite(slope):
                skipped += 1
            else:
                total += math.log(slope)
                used += 1
        u = float(model.step(u))
    exponent = total / used if used else math.nan
    return LyapunovEstimate(exponent, used, skipped)
