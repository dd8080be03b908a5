"""Two-species competition maps, their equilibria, Jacobians, nullclines and
critical curves.

Families:

* ``GENERAL_BH``          x' = r1 x^d1 / (1 + x^d1 + b1 y^d3)
                          y' = r2 y^d2 / (1 + y^d2 + b2 x^d4)
* ``SYMMETRIC_BH``        the above with r1=r2=r, b1=b2=b, d1=d2=delta, d3=d4=d
* ``SCRAMBLE_MATING``     x' = x exp(r (1 - x) - a y) b x / (1 + b x)  (and symmetric in y)
* ``SCRAMBLE_PREDATION``  x' = x exp(r (1 - x) - a y - m / (1 + b x))
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from . import numerics
from .errors import DomainError, HypothesisError, PreconditionError
from .scalar import ScalarModel, critical_r, find_equilibria_scalar, fixed_points_1d

TOL_RESID = 1e-10
HYPERBOLIC_BAND = 1e-9


class PlanarFamily(str, Enum):
    GENERAL_BH = "general-bh"
    SYMMETRIC_BH = "symmetric-bh"
    SCRAMBLE_MATING = "scramble-mating"
    SCRAMBLE_PREDATION = "scramble-predation"


_PARAMS = {
    PlanarFamily.GENERAL_BH: ("r1", "r2", "b1", "b2", "delta1", "delta2", "delta3", "delta4"),
    PlanarFamily.SYMMETRIC_BH: ("r", "b", "delta", "d"),
    PlanarFamily.SCRAMBLE_MATING: ("r", "a", "b"),
    PlanarFamily.SCRAMBLE_PREDATION: ("r", "a", "m", "b"),
}

# family codes understood by the compiled kernels
CODE_BH, CODE_MATING, CODE_PREDATION = 0, 1, 2


@dataclass(frozen=True)
class PlanarMap:
    family: PlanarFamily
    params: dict

    def __post_init__(self):
        family = PlanarFamily(self.family)
        object.__setattr__(self, "family", family)
        names = _PARAMS[family]
        if set(self.params) != set(names):
            raise ValueError(f"{family.value} expects parameters {names}, got {sorted(self.params)}")
        clean = {}
        for name in names:
            value = float(self.params[name])
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"parameter {name} must be finite and > 0, got {value}")
            clean[name] = value
        object.__setattr__(self, "params", clean)

    @classmethod
    def general_bh(cls, r1, r2, b1, b2, delta1, delta2, delta3, delta4):
        return cls(PlanarFamily.GENERAL_BH, dict(r1=r1, r2=r2, b1=b1, b2=b2, delta1=delta1,
                                                 delta2=delta2, delta3=delta3, delta4=delta4))

    @classmethod
    def symmetric_bh(cls, r, b, delta, d):
        return cls(PlanarFamily.SYMMETRIC_BH, dict(r=r, b=b, delta=delta, d=d))

    @classmethod
    def scramble_mating(cls, r, a, b):
        return cls(PlanarFamily.SCRAMBLE_MATING, dict(r=r, a=a, b=b))

    @classmethod
    def scramble_predation(cls, r, a, m, b):
        return cls(PlanarFamily.SCRAMBLE_PREDATION, dict(r=r, a=a, m=m, b=b))

    @property
    def is_bh(self):
        return self.family in (PlanarFamily.GENERAL_BH, PlanarFamily.SYMMETRIC_BH)

    def bh_params(self):
        """(r1, r2, b1, b2, d1, d2, d3, d4) for either Beverton-Holt family."""
        p = self.params
        if self.family is PlanarFamily.GENERAL_BH:
            return tuple(p[k] for k in _PARAMS[PlanarFamily.GENERAL_BH])
        if self.family is PlanarFamily.SYMMETRIC_BH:
            return (p["r"], p["r"], p["b"], p["b"], p["delta"], p["delta"], p["d"], p["d"])
        raise TypeError(f"{self.family.value} is not a Beverton-Holt family")

    def as_general(self):
        return PlanarMap.general_bh(*self.bh_params())

    def kernel_args(self):
        """(family code, float64 parameter vector) for the compiled kernels."""
        p = self.params
        if self.is_bh:
            return CODE_BH, np.array(self.bh_params(), dtype=np.float64)
        if self.family is PlanarFamily.SCRAMBLE_MATING:
            return CODE_MATING, np.array([p["r"], p["a"], p["b"]], dtype=np.float64)
        return CODE_PREDATION, np.array([p["r"], p["a"], p["m"], p["b"]], dtype=np.float64)

    def is_symmetric(self):
        if self.family is PlanarFamily.GENERAL_BH:
            r1, r2, b1, b2, d1, d2, d3, d4 = self.bh_params()
            return r1 == r2 and b1 == b2 and d1 == d2 and d3 == d4
        return True

    def axis_model(self, axis):
        """Scalar map on the invariant axis (``axis`` 0 is the x-axis)."""
        if self.is_bh:
            r1, r2, _, _, d1, d2, _, _ = self.bh_params()
            return ScalarModel.sigmoid_bh(r1, d1) if axis == 0 else ScalarModel.sigmoid_bh(r2, d2)
        p = self.params
        if self.family is PlanarFamily.SCRAMBLE_PREDATION:
            return ScalarModel.ricker_allee(p["r"], p["m"], p["b"])
        return None

    def to_record(self):
        rec = {"family": self.family.value}
        rec.update({k: repr(v) for k, v in self.params.items()})
        return rec


# ----------------------------------------------------------------------------
# evaluation

def _check_state(x, y):
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("state must be finite")
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("state must be nonnegative")


def step_xy(m: PlanarMap, x, y):
    """Image of (x, y) under the map; x and y may be arrays of any float dtype."""
    if m.is_bh:
        r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
        xd1 = x ** d1
        yd2 = y ** d2
        return (r1 * xd1 / (1 + xd1 + b1 * y ** d3),
                r2 * yd2 / (1 + yd2 + b2 * x ** d4))
    p = m.params
    r, a, b = p["r"], p["a"], p["b"]
    if m.family is PlanarFamily.SCRAMBLE_MATING:
        return (x * np.exp(r * (1 - x) - a * y) * (b * x / (1 + b * x)),
                y * np.exp(r * (1 - y) - a * x) * (b * y / (1 + b * y)))
    mm = p["m"]
    return (x * np.exp(r * (1 - x) - a * y - mm / (1 + b * x)),
            y * np.exp(r * (1 - y) - a * x - mm / (1 + b * y)))


def step(m: PlanarMap, s):
    """Image of a state ``(x, y)`` or of an ``(n, 2)`` array of states."""
    s = np.asarray(s)
    s = s if s.dtype.kind == "f" else s.astype(float)
    x, y = s[..., 0], s[..., 1]
    _check_state(x, y)
    nx, ny = step_xy(m, x, y)
    return np.stack([nx, ny], axis=-1)


def iterate(m: PlanarMap, s0, steps):
    """Orbit of ``s0`` as a ``(steps + 1, 2)`` array."""
    out = np.empty((steps + 1, 2))
    x, y = float(s0[0]), float(s0[1])
    _check_state(x, y)
    out[0] = x, y
    for t in range(1, steps + 1):
        x, y = step_xy(m, x, y)
        out[t] = x, y
    return out


def _powz(u, p):
    """u**p with 0**p -> 0 (p > 0), 1 (p == 0), inf (p < 0)."""
    if p == 0:
        return np.ones_like(u)
    with np.errstate(divide="ignore"):
        return u ** p


def jacobian_analytic(m: PlanarMap, x, y):
    """Analytic Jacobian entries (J11, J12, J21, J22), vectorized.  Entries
    can be non-finite on the axes when an exponent is below one."""
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        if m.is_bh:
            r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
            by = b1 * _powz(y, d3)
            bx = b2 * _powz(x, d4)
            D1 = 1 + x ** d1 + by
            D2 = 1 + y ** d2 + bx
            j11 = r1 * d1 * _powz(x, d1 - 1) * (1 + by) / D1 ** 2
            j12 = -r1 * b1 * d3 * x ** d1 * _powz(y, d3 - 1) / D1 ** 2
            j21 = -r2 * b2 * d4 * y ** d2 * _powz(x, d4 - 1) / D2 ** 2
            j22 = r2 * d2 * _powz(y, d2 - 1) * (1 + bx) / D2 ** 2
            return j11, j12, j21, j22
        p = m.params
        r, a, b = p["r"], p["a"], p["b"]
        if m.family is PlanarFamily.SCRAMBLE_MATING:
            ex = np.exp(r * (1 - x) - a * y)
            ey = np.exp(r * (1 - y) - a * x)
            bx1, by1 = 1 + b * x, 1 + b * y
            j11 = ex * b * x * ((2 + b * x) / bx1 ** 2 - r * x / bx1)
            j22 = ey * b * y * ((2 + b * y) / by1 ** 2 - r * y / by1)
            j12 = -a * x * ex * b * x / bx1
            j21 = -a * y * ey * b * y / by1
            return j11, j12, j21, j22
        mm = p["m"]
        bx1, by1 = 1 + b * x, 1 + b * y
        ex = np.exp(r * (1 - x) - a * y - mm / bx1)
        ey = np.exp(r * (1 - y) - a * x - mm / by1)
        j11 = ex * (1 + x * (-r + mm * b / bx1 ** 2))
        j22 = ey * (1 + y * (-r + mm * b / by1 ** 2))
        j12 = -a * x * ex
        j21 = -a * y * ey
        return j11, j12, j21, j22


def _one_sided(m, x, y, entry):
    # forward difference into the quadrant; used only where the analytic limit is singular
    i, j = divmod(entry, 2)
    h = 1e-7 * max(1.0, x if j == 0 else y)
    base = step_xy(m, x, y)[i]
    if j == 0:
        return (step_xy(m, x + h, y)[i] - base) / h
    return (step_xy(m, x, y + h)[i] - base) / h


def jacobian(m: PlanarMap, s):
    """2x2 Jacobian at ``s``.  Analytic wherever it is finite; one-sided
    finite differences for axis entries whose exponents make the analytic
    form singular."""
    x, y = np.float64(s[0]), np.float64(s[1])
    _check_state(x, y)
    entries = [float(v) for v in jacobian_analytic(m, x, y)]
    for k, v in enumerate(entries):
        if not math.isfinite(v):
            entries[k] = float(_one_sided(m, x, y, k))
    return np.array([[entries[0], entries[1]], [entries[2], entries[3]]])


def det_jacobian(m: PlanarMap, x, y):
    j11, j12, j21, j22 = jacobian_analytic(m, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return j11 * j22 - j12 * j21


# ----------------------------------------------------------------------------
# stability

class StabilityClass(str, Enum):
    SINK = "Sink"
    SADDLE = "Saddle"
    SOURCE = "Source"
    NONHYPERBOLIC = "NonHyperbolic"


def residual(m: PlanarMap, s):
    nx, ny = step_xy(m, float(s[0]), float(s[1]))
    return max(abs(nx - s[0]), abs(ny - s[1]))


def classify_eigenvalues(eigs, band=HYPERBOLIC_BAND):
    mods = np.abs(np.asarray(eigs))
    if np.any(np.abs(mods - 1) <= band):
        return StabilityClass.NONHYPERBOLIC
    inside = int(np.count_nonzero(mods < 1))
    if inside == len(mods):
        return StabilityClass.SINK
    if inside == 0:
        return StabilityClass.SOURCE
    return StabilityClass.SADDLE


def local_stability(m: PlanarMap, p, tol=TOL_RESID):
    """Eigenvalues of the Jacobian at the fixed point ``p`` and their class."""
    if residual(m, p) > tol:
        raise PreconditionError(f"{tuple(p)} is not a fixed point (residual {residual(m, p):.3g})")
    eigs = np.linalg.eigvals(jacobian(m, p))
    eigs = np.array(sorted(eigs, key=lambda z: (abs(z), z.real)))
    if np.all(np.abs(eigs.imag) == 0):
        eigs = eigs.real
    return eigs, classify_eigenvalues(eigs)


@dataclass(frozen=True)
class Equilibrium:
    x: float
    y: float
    role: str
    eigenvalues: tuple
    stability: StabilityClass

    @property
    def point(self):
        return np.array([self.x, self.y])


def _equilibrium(m, x, y, role):
    eigs, cls = local_stability(m, (x, y))
    return Equilibrium(float(x), float(y), role, tuple(eigs.tolist()), cls)


@dataclass
class PlanarEquilibria:
    boundary: List[Equilibrium] = field(default_factory=list)
    interior: List[Equilibrium] = field(default_factory=list)
    h1: Optional[bool] = None
    ambiguous: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def all(self):
        return self.boundary + self.interior

    def points(self):
        return [e.point for e in self.all]

    def by_role(self, role):
        return [e for e in self.all if e.role == role]


# ----------------------------------------------------------------------------
# boundary equilibria

def condition_h1(m: PlanarMap):
    """delta_i > 1 and r_i above the sigmoid Beverton-Holt threshold, i = 1, 2."""
    if not m.is_bh:
        return False
    r1, r2, _, _, d1, d2, _, _ = m.bh_params()
    ok = True
    for r, d in ((r1, d1), (r2, d2)):
        rc = critical_r(ScalarModel.sigmoid_bh(r, d))
        ok = ok and rc is not None and r > rc
    return ok


def _mating_axis(m):
    p = m.params
    r, b = p["r"], p["b"]

    def H(u):
        return b * u * u * np.exp(r * (1 - u)) / (1 + b * u)

    def dH(u):
        return np.exp(r * (1 - u)) * b * u * ((2 + b * u) / (1 + b * u) ** 2 - r * u / (1 + b * u))

    return H, dH


def axis_roots(m: PlanarMap, axis):
    """Positive fixed points of the map restricted to one axis."""
    model = m.axis_model(axis)
    if model is not None:
        return [r.value for r in find_equilibria_scalar(model).positive]
    H, dH = _mating_axis(m)
    roots, _ = fixed_points_1d(H, dH, 2.0)
    return roots


def boundary_equilibria(m: PlanarMap) -> PlanarEquilibria:
    """Fixed points on the axes, labelled E0, ExA, ExK, EyA, EyK.

    On each axis a root where the axis map crosses the diagonal upward
    (slope > 1) is the Allee threshold, the others are carrying capacities.
    ``h1`` records whether Condition H1 holds.
    """
    out = PlanarEquilibria(h1=condition_h1(m) if m.is_bh else None)
    out.boundary.append(_equilibrium(m, 0.0, 0.0, "E0"))
    for axis, (lo_role, hi_role) in enumerate((("ExA", "ExK"), ("EyA", "EyK"))):
        for u in axis_roots(m, axis):
            pt = (u, 0.0) if axis == 0 else (0.0, u)
            model = m.axis_model(axis)
            if model is not None:
                slope = model.derivative(u)
            else:
                slope = _mating_axis(m)[1](u)
            role = lo_role if slope > 1 else hi_role
            out.boundary.append(_equilibrium(m, pt[0], pt[1], role))
    return out


# ----------------------------------------------------------------------------
# nullclines and interior equilibria (Beverton-Holt families)

def _nullcline_radicand(r, d, u):
    return r * u ** (d - 1) - u ** d - 1


def nullcline_f1(m: PlanarMap, x):
    """y = F1(x): the curve where x is stationary.  NaN where undefined."""
    r1, _, b1, _, d1, _, d3, _ = m.bh_params()
    rad = _nullcline_radicand(r1, d1, np.asarray(x, dtype=float)) / b1
    with np.errstate(invalid="ignore"):
        return np.where(rad >= 0, np.abs(rad) ** (1 / d3), np.nan)


def nullcline_f2(m: PlanarMap, y):
    """x = F2(y): the curve where y is stationary.  NaN where undefined."""
    _, r2, _, b2, _, d2, _, d4 = m.bh_params()
    rad = _nullcline_radicand(r2, d2, np.asarray(y, dtype=float)) / b2
    with np.errstate(invalid="ignore"):
        return np.where(rad >= 0, np.abs(rad) ** (1 / d4), np.nan)


def _level_roots(r, d, levels, iterations=80):
    """Both solutions of r u^(d-1) - u^d = c for each level c (d > 1):
    one on (0, u_c], one on [u_c, r], where u_c = r (d - 1) / d.  NaN where
    the level exceeds the maximum."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    uc = r * (d - 1) / d
    top = r * uc ** (d - 1) - uc ** d

    def p(u):
        return r * u ** (d - 1) - u ** d

    bad = levels > top * (1 + 1e-12)
    levels = np.minimum(levels, top)
    lo_a = np.zeros_like(levels)
    hi_a = np.full_like(levels, uc)
    lo_k = np.full_like(levels, uc)
    hi_k = np.full_like(levels, r)
    for _ in range(iterations):
        mid = 0.5 * (lo_a + hi_a)
        below = p(mid) < levels
        lo_a = np.where(below, mid, lo_a)
        hi_a = np.where(below, hi_a, mid)
        mid = 0.5 * (lo_k + hi_k)
        below = p(mid) < levels
        lo_k = np.where(below, lo_k, mid)
        hi_k = np.where(below, mid, hi_k)
    ua = np.where(bad, np.nan, 0.5 * (lo_a + hi_a))
    uk = np.where(bad, np.nan, 0.5 * (lo_k + hi_k))
    return ua, uk


def _polish(m, x, y, iterations=6):
    """Newton on T(s) - s from (x, y); keeps the best iterate."""
    s = np.array([x, y], dtype=float)
    best, best_res = s.copy(), residual(m, s)
    for _ in range(iterations):
        if best_res == 0:
            break
        J = jacobian(m, s) - np.eye(2)
        F = np.array(step_xy(m, s[0], s[1])) - s
        try:
            s = s - np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            break
        res = residual(m, s)
        if res < best_res:
            best, best_res = s.copy(), res
        else:
            break
    return best, best_res


@dataclass
class _InteriorSearch:
    points: list
    ambiguous: list


def _bh_interior(m: PlanarMap, n=4096, tol=TOL_RESID):
    r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
    ex = [r.value for r in find_equilibria_scalar(ScalarModel.sigmoid_bh(r1, d1)).positive]
    ey = [r.value for r in find_equilibria_scalar(ScalarModel.sigmoid_bh(r2, d2)).positive]
    if len(ex) < 2 or len(ey) < 2:
        return _InteriorSearch([], [])
    A2, K2 = ey[0], ey[-1]
    # top of the x-nullcline: F1(x_c)
    y_top = float(nullcline_f1(m, r1 * (d1 - 1) / d1))
    if not y_top > A2:
        return _InteriorSearch([], [])

    def phi(xv, yv):
        # residual of the y-equation, scaled like the nullcline radicand
        return _nullcline_radicand(r2, d2, yv) - b2 * xv ** d4

    def x_on_branch(yv, branch):
        ua, uk = _level_roots(r1, d1, 1 + b1 * np.asarray(yv, dtype=float) ** d3)
        return ua if branch == 0 else uk

    uc = r1 * (d1 - 1) / d1
    top = r1 * uc ** (d1 - 1) - uc ** d1

    def x_on_branch_scalar(yv, branch):
        level = min(1 + b1 * yv ** d3, top)
        g = lambda u: r1 * u ** (d1 - 1) - u ** d1 - level
        if g(uc) <= 0:
            return uc
        if branch == 0:
            return brentq(g, 0.0, uc, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
        return brentq(g, uc, r1, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)

    y_hi = min(K2, y_top)
    pieces = []
    if y_top >= K2:
        grid = numerics.chebyshev_grid(A2, K2, n)
        pieces = [(0, grid), (1, grid)]
    else:
        grid = numerics.chebyshev_grid(A2, y_hi, n)
        # one closed path: lower branch up to the fold, upper branch back down
        pieces = [(0, grid), (1, grid)]

    found, ambiguous = [], []
    for branch, grid in pieces:
        xs = x_on_branch(grid, branch)
        if branch == 1 and y_top < K2:
            xs[-1] = x_on_branch(grid[-1:], 0)[0]  # the fold point is shared
        vals = phi(xs, grid)

        def f(yv, branch=branch):
            return float(phi(x_on_branch_scalar(yv, branch), yv))

        for br in numerics.bracket_scan(lambda g, v=vals: v, (grid[0], grid[-1]), grid=grid):
            yv = numerics.refine_root(f, br, tol=1e-15).value
            found.append((x_on_branch_scalar(yv, branch), yv))
        # tangential contacts: a local extremum of phi touching zero without a sign change
        a = np.abs(vals)
        scale = 1e-9 * (1 + np.max(np.abs(vals[np.isfinite(vals)])))
        for i in range(1, len(grid) - 1):
            if (a[i] < scale and a[i] <= a[i - 1] and a[i] <= a[i + 1]
                    and vals[i - 1] * vals[i + 1] > 0 and vals[i] * vals[i - 1] > 0):
                ambiguous.append((float(xs[i]), float(grid[i])))

    points = []
    for x, y in found:
        (px, py), res = _polish(m, x, y)
        if res > tol:
            ambiguous.append((float(px), float(py)))
            continue
        if all(max(abs(px - qx), abs(py - qy)) > 1e-9 for qx, qy in points):
            points.append((float(px), float(py)))
    return _InteriorSearch(points, ambiguous)


def _newton_interior(m: PlanarMap, window=None, n=64, tol=TOL_RESID):
    """Interior fixed points by damped Newton on the per-capita residual
    (T1/x - 1, T2/y - 1), seeded at local minima of its norm on a grid."""
    if window is None:
        if m.is_bh:
            r1, r2 = m.bh_params()[:2]
            window = (r1, r2)
        else:
            window = (1.2, 1.2)
    xs = np.linspace(0, window[0], n + 1)[1:]
    ys = np.linspace(0, window[1], n + 1)[1:]
    X, Y = np.meshgrid(xs, ys, indexing="ij")

    def G(x, y):
        tx, ty = step_xy(m, x, y)
        return tx / x - 1, ty / y - 1

    with np.errstate(all="ignore"):
        gx, gy = G(X, Y)
    norm = np.hypot(gx, gy)
    pad = np.pad(norm, 1, constant_values=np.inf)
    seeds = []
    for i in range(n):
        for j in range(n):
            v = norm[i, j]
            if np.isfinite(v) and v <= pad[i:i + 3, j:j + 3].min():
                seeds.append((X[i, j], Y[i, j]))

    points, ambiguous = [], []
    for x, y in seeds:
        s = np.array([x, y])
        for _ in range(100):
            gxv, gyv = G(s[0], s[1])
            F = np.array([gxv, gyv])
            fn = np.hypot(*F)
            if fn < 1e-14:
                break
            j11, j12, j21, j22 = [float(v) for v in jacobian_analytic(m, s[0], s[1])]
            tx, ty = step_xy(m, s[0], s[1])
            JG = np.array([[(j11 * s[0] - tx) / s[0] ** 2, j12 / s[0]],
                           [j21 / s[1], (j22 * s[1] - ty) / s[1] ** 2]])
            try:
                delta = np.linalg.solve(JG, F)
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            while lam > 1e-6:
                trial = s - lam * delta
                if np.all(trial > 0):
                    tg = np.hypot(*G(trial[0], trial[1]))
                    if tg < fn:
                        break
                lam *= 0.5
            else:
                break
            s = trial
        if np.all(s > 1e-9) and residual(m, s) <= tol:
            if all(max(abs(s[0] - q[0]), abs(s[1] - q[1])) > 1e-8 for q in points):
                points.append((float(s[0]), float(s[1])))
    return _InteriorSearch(points, ambiguous)


def interior_equilibria(m: PlanarMap, tol=TOL_RESID, n=4096) -> PlanarEquilibria:
    """Interior fixed points with stability.

    Beverton-Holt maps with both intra-specific exponents above one are
    searched along the x-nullcline, parametrized by y on each of its two
    branches: sign changes of the y-equation residual are bracketed and
    refined, then polished by Newton on the map.  Other maps use damped
    Newton from a seeded grid.  Tangential contacts are reported in
    ``ambiguous``, never silently dropped.
    """
    if m.is_bh and min(m.bh_params()[4:6]) > 1:
        search = _bh_interior(m, n=n, tol=tol)
    else:
        search = _newton_interior(m, tol=tol)
    out = PlanarEquilibria(h1=condition_h1(m) if m.is_bh else None)
    for x, y in sorted(search.points):
        out.interior.append(_equilibrium(m, x, y, "Interior"))
    out.ambiguous = search.ambiguous
    return out


def equilibria(m: PlanarMap, tol=TOL_RESID) -> PlanarEquilibria:
    """Boundary and interior equilibria together."""
    b = boundary_equilibria(m)
    i = interior_equilibria(m, tol=tol)
    b.interior = i.interior
    b.ambiguous = i.ambiguous
    return b


class PredictedCount(str, Enum):
    ZERO = "Zero"
    TWO = "Two"
    FOUR = "Four"
    OUTSIDE = "OutsideTheoremCases"


@dataclass
class NullclineAnalysis:
    x_c: float
    y_c: float
    F1_at_xc: float
    F2_at_yc: float
    predicted_count: PredictedCount
    located: List[Equilibrium]
    thresholds: dict
    curves: dict = field(default_factory=dict)
    ambiguous: list = field(default_factory=list)


def predicted_interior_count(F1c, F2c, A1, K1, A2, K2) -> PredictedCount:
    """Sufficient conditions on the nullcline maxima for 0, 2 or 4 interior
    equilibria; ``OUTSIDE`` when none of them holds."""
    if F1c < A2 or F2c < A1:
        return PredictedCount.ZERO
    if (A2 < F1c < K2 and K1 < F2c) or (A1 < F2c < K1 and K2 < F1c):
        return PredictedCount.TWO
    if F1c > K2 and F2c > K1:
        return PredictedCount.FOUR
    return PredictedCount.OUTSIDE


def nullclines(m: PlanarMap, samples=400) -> NullclineAnalysis:
    """Nullcline maxima, the predicted interior count, the located interior
    points and sampled curves ``F1`` (y = F1(x), x in [A1, K1]) and ``F2``
    (x = F2(y), y in [A2, K2])."""
    if not m.is_bh:
        raise TypeError("nullclines are defined for the Beverton-Holt families")
    if not condition_h1(m):
        raise HypothesisError("H1")
    r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
    ex = [r.value for r in find_equilibria_scalar(ScalarModel.sigmoid_bh(r1, d1)).positive]
    ey = [r.value for r in find_equilibria_scalar(ScalarModel.sigmoid_bh(r2, d2)).positive]
    A1, K1, A2, K2 = ex[0], ex[-1], ey[0], ey[-1]
    x_c = r1 * (d1 - 1) / d1
    y_c = r2 * (d2 - 1) / d2
    F1c = float(nullcline_f1(m, x_c))
    F2c = float(nullcline_f2(m, y_c))
    found = interior_equilibria(m)

    xs = numerics.chebyshev_grid(A1, K1, samples - 1)
    ys = numerics.chebyshev_grid(A2, K2, samples - 1)
    # endpoints are the axis roots, where the curves meet the axes
    f1 = np.nan_to_num(nullcline_f1(m, xs), nan=0.0)
    f2 = np.nan_to_num(nullcline_f2(m, ys), nan=0.0)
    f1[[0, -1]] = 0.0
    f2[[0, -1]] = 0.0
    curves = {"F1": (xs, f1), "F2": (f2, ys)}
    return NullclineAnalysis(
        x_c=x_c, y_c=y_c, F1_at_xc=F1c, F2_at_yc=F2c,
        predicted_count=predicted_interior_count(F1c, F2c, A1, K1, A2, K2),
        located=found.interior,
        thresholds={"A1": A1, "K1": K1, "A2": A2, "K2": K2},
        curves=curves, ambiguous=found.ambiguous)


# ----------------------------------------------------------------------------
# monotonicity and critical curves

class MonotoneKind(str, Enum):
    STRONGLY_COMPETITIVE = "StronglyCompetitive"
    CONDITIONALLY_MONOTONE = "ConditionallyMonotone"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class MonotoneClass:
    kind: MonotoneKind
    witnesses: dict


def growth_bounds(m: PlanarMap):
    """Upper bounds on r1 and r2 under which a map with d1 d2 < d3 d4 still
    has convergent orbits.  ``None`` when d1 d2 >= d3 d4."""
    r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
    intra, inter = d1 * d2, d3 * d4
    if intra >= inter:
        return None
    return ((intra / (b2 * (inter - intra))) ** (1 / d4),
            (intra / (b1 * (inter - intra))) ** (1 / d3))


def monotonicity_class(m: PlanarMap) -> MonotoneClass:
    r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
    witnesses = {"intra": d1 * d2, "inter": d3 * d4}
    if d1 * d2 >= d3 * d4:
        return MonotoneClass(MonotoneKind.STRONGLY_COMPETITIVE, witnesses)
    bound1, bound2 = growth_bounds(m)
    witnesses.update(r1=r1, r1_bound=bound1, r2=r2, r2_bound=bound2)
    if r1 < bound1 or r2 < bound2:
        return MonotoneClass(MonotoneKind.CONDITIONALLY_MONOTONE, witnesses)
    return MonotoneClass(MonotoneKind.INDETERMINATE, witnesses)


def critical_curve_threshold(m: PlanarMap):
    """Smallest x at which the zero-determinant curve y = gamma(x) exists."""
    r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
    if d1 * d2 >= d3 * d4:
        raise HypothesisError("d1*d2 < d3*d4")
    return (d1 * d2 / (b2 * (d3 * d4 - d1 * d2))) ** (1 / d4)


def critical_curve(m: PlanarMap, x):
    """y = gamma(x), the curve in the open quadrant where det J vanishes."""
    r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
    x_min = critical_curve_threshold(m)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= x_min):
        raise DomainError(f"gamma(x) needs x > {x_min!r}", threshold=x_min)
    intra, inter = d1 * d2, d3 * d4
    bx = b2 * xa ** d4
    g = (intra * (1 + bx) / (b1 * (bx * (inter - intra) - intra))) ** (1 / d3)
    return float(g) if np.ndim(x) == 0 else g


# ----------------------------------------------------------------------------
# symmetric model

def symmetric_eigenvalues(m: PlanarMap, x_star):
    """Eigenvalues along and across the diagonal at a symmetric fixed point."""
    r, b, delta, d = (m.params[k] for k in ("r", "b", "delta", "d"))
    bxd = b * x_star ** d
    den = 1 + x_star ** delta + bxd
    return (delta + bxd * (delta - d)) / den, (delta + bxd * (delta + d)) / den


def symmetric_stability(m: PlanarMap, x_star, tol=TOL_RESID):
    """(lambda1, lambda2, verdict) at the diagonal fixed point (x*, x*).

    ``lambda1`` governs motion along the diagonal and ``lambda2`` motion
    across it.  Stable iff |lambda1| < 1 and lambda2 < 1; Unstable iff
    |lambda1| > 1 or lambda2 > 1; Marginal otherwise.
    """
    if m.family is not PlanarFamily.SYMMETRIC_BH:
        raise TypeError("symmetric_stability needs a SymmetricBH map")
    if residual(m, (x_star, x_star)) > tol:
        raise PreconditionError(f"({x_star}, {x_star}) is not a fixed point")
    l1, l2 = symmetric_eigenvalues(m, x_star)
    if abs(l1) < 1 and l2 < 1:
        verdict = "Stable"
    elif abs(l1) > 1 or l2 > 1:
        verdict = "Unstable"
    else:
        verdict = "Marginal"
    return l1, l2, verdict


def diagonal_model(m: PlanarMap) -> ScalarModel:
    """The scalar MSS map the symmetric model reduces to on x = y."""
    p = m.params
    return ScalarModel.mss(p["r"], p["delta"], p["b"], p["d"])
