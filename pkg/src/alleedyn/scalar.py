"""One-dimensional Allee-effect maps u -> H(u) = u h(u).

Families:

* ``SIGMOID_BH``     H = r u^delta / (1 + u^delta)
* ``SCALED_BH``      H = r u^delta / (a + u^delta)
* ``ELAYDI_SACKER``  H = u (d u + e) / (u^2 + b u + c)
* ``RICKER_ALLEE``   H = u exp(r (1 - u) - m / (1 + b u))
* ``MSS``            H = r u^delta / (1 + u^delta + b u^d)

All evaluation is vectorized over numpy arrays and keeps the input dtype, so
the same code runs in float64 and in extended precision.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from . import numerics
from .errors import DomainError

TOL_RESID = 1e-10
STABILITY_BAND = 1e-9


class Family(str, Enum):
    SIGMOID_BH = "sigmoid-bh"
    SCALED_BH = "scaled-bh"
    ELAYDI_SACKER = "elaydi-sacker"
    RICKER_ALLEE = "ricker-allee"
    MSS = "mss"


# parameter names, and which of them must be strictly positive
_PARAMS = {
    Family.SIGMOID_BH: (("r", "delta"), ("r", "delta")),
    Family.SCALED_BH: (("r", "a", "delta"), ("r", "a", "delta")),
    Family.ELAYDI_SACKER: (("d", "e", "b", "c"), ("c",)),
    Family.RICKER_ALLEE: (("r", "m", "b"), ("r",)),
    Family.MSS: (("r", "delta", "b", "d"), ("r", "delta", "b", "d")),
}


class Role(str, Enum):
    ORIGIN = "Origin"
    ALLEE_THRESHOLD = "AlleeThreshold"
    CARRYING_CAPACITY = "CarryingCapacity"
    OTHER = "Other"


class Stability(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


class Regime(str, Enum):
    NONE = "None"
    WEAK = "Weak"
    STRONG = "Strong"


def _pow(u, p):
    # 0**p for p > 0 is 0; numpy handles that, and we never ask for p <= 0 at u = 0
    return u ** p


@dataclass(frozen=True)
class ScalarModel:
    family: Family
    params: dict

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        names, positive = _PARAMS[family]
        if set(self.params) != set(names):
            raise ValueError(f"{family.value} expects parameters {names}, got {sorted(self.params)}")
        clean = {}
        for name in names:
            value = float(self.params[name])
            if not math.isfinite(value):
                raise ValueError(f"parameter {name} must be finite")
            if name in positive and not value > 0:
                raise ValueError(f"parameter {name} must be > 0, got {value}")
            if value < 0:
                raise ValueError(f"parameter {name} must be >= 0, got {value}")
            clean[name] = value
        object.__setattr__(self, "params", clean)

    # constructors -------------------------------------------------------
    @classmethod
    def sigmoid_bh(cls, r, delta):
        return cls(Family.SIGMOID_BH, {"r": r, "delta": delta})

    @classmethod
    def scaled_bh(cls, r, a, delta):
        return cls(Family.SCALED_BH, {"r": r, "a": a, "delta": delta})

    @classmethod
    def elaydi_sacker(cls, d, e, b, c):
        return cls(Family.ELAYDI_SACKER, {"d": d, "e": e, "b": b, "c": c})

    @classmethod
    def ricker_allee(cls, r, m, b):
        return cls(Family.RICKER_ALLEE, {"r": r, "m": m, "b": b})

    @classmethod
    def mss(cls, r, delta, b, d):
        return cls(Family.MSS, {"r": r, "delta": delta, "b": b, "d": d})

    def __getattr__(self, name):
        params = self.__dict__.get("params", {})
        if name in params:
            return params[name]
        raise AttributeError(name)

    # evaluation ---------------------------------------------------------
    def step(self, u):
        """H(u).  Scalars in, float out; arrays in, arrays out."""
        scalar = np.isscalar(u)
        arr = np.asarray(u)
        if not np.all(np.isfinite(arr)):
            raise DomainError("density must be finite")
        if np.any(arr < 0):
            raise DomainError("density must be nonnegative")
        out = self._H(arr if arr.dtype.kind == "f" else arr.astype(float))
        return float(out) if scalar else out

    def _H(self, u):
        p = self.params
        f = self.family
        if f is Family.SIGMOID_BH:
            ud = _pow(u, p["delta"])
            return p["r"] * ud / (1 + ud)
        if f is Family.SCALED_BH:
            ud = _pow(u, p["delta"])
            return p["r"] * ud / (p["a"] + ud)
        if f is Family.ELAYDI_SACKER:
            return u * (p["d"] * u + p["e"]) / (u * u + p["b"] * u + p["c"])
        if f is Family.RICKER_ALLEE:
            return u * np.exp(p["r"] * (1 - u) - p["m"] / (1 + p["b"] * u))
        ud = _pow(u, p["delta"])
        return p["r"] * ud / (1 + ud + p["b"] * _pow(u, p["d"]))

    def derivative(self, u):
        """Analytic H'(u).  At u = 0 with a power below one the limit is +inf."""
        scalar = np.isscalar(u)
        arr = np.asarray(u)
        arr = arr if arr.dtype.kind == "f" else arr.astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._dH(arr)
        return float(out) if scalar else out

    def _dH(self, u):
        p = self.params
        f = self.family
        if f in (Family.SIGMOID_BH, Family.SCALED_BH, Family.MSS):
            delta = p["delta"]
            ud = _pow(u, delta)
            lead = self._pow_m1(u, delta)
            if f is Family.SIGMOID_BH:
                return p["r"] * delta * lead / (1 + ud) ** 2
            if f is Family.SCALED_BH:
                return p["r"] * p["a"] * delta * lead / (p["a"] + ud) ** 2
            bud = p["b"] * _pow(u, p["d"])
            return p["r"] * lead * (delta + bud * (delta - p["d"])) / (1 + ud + bud) ** 2
        if f is Family.ELAYDI_SACKER:
            num = p["d"] * u * u + p["e"] * u
            den = u * u + p["b"] * u + p["c"]
            return ((2 * p["d"] * u + p["e"]) * den - num * (2 * u + p["b"])) / den ** 2
        bu = 1 + p["b"] * u
        growth = np.exp(p["r"] * (1 - u) - p["m"] / bu)
        return growth * (1 - p["r"] * u + p["m"] * p["b"] * u / bu ** 2)

    @staticmethod
    def _pow_m1(u, delta):
        # u^(delta-1) with the u = 0 limit made explicit
        if delta == 1:
            return np.ones_like(u)
        out = _pow(u, delta - 1)
        if delta < 1:
            out = np.where(u == 0, np.inf, out)
        return out

    def per_capita(self, u):
        """h(u) = H(u)/u, with the u -> 0 limit at u = 0."""
        arr = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(arr > 0, self._H(arr) / np.where(arr > 0, arr, 1.0), self.per_capita_at_zero())
        return float(out) if np.isscalar(u) else out

    def per_capita_at_zero(self):
        p = self.params
        f = self.family
        if f in (Family.SIGMOID_BH, Family.SCALED_BH, Family.MSS):
            delta = p["delta"]
            if delta > 1:
                return 0.0
            if delta < 1:
                return math.inf
            return p["r"] / (p["a"] if f is Family.SCALED_BH else 1.0)
        if f is Family.ELAYDI_SACKER:
            return p["e"] / p["c"]
        return math.exp(p["r"] - p["m"])

    def default_u_max(self):
        """Upper end of an interval that holds every positive fixed point."""
        p = self.params
        if self.family in (Family.SIGMOID_BH, Family.SCALED_BH, Family.MSS):
            # H < r, so fixed points lie below r
            return 2.0 * p["r"]
        if self.family is Family.ELAYDI_SACKER:
            # roots of u^2 + (b - d) u + (c - e) are below d + sqrt(e) + 1
            return 2.0 * (p["d"] + math.sqrt(p["e"]) + 1.0)
        # h(u) < exp(r (1 - u)) < 1 for u > 1
        return 2.0

    def to_record(self):
        """Flat key-value record: family tag plus named parameters."""
        rec = {"family": self.family.value}
        rec.update({k: repr(v) for k, v in self.params.items()})
        return rec


def step_scalar(model: ScalarModel, u):
    return model.step(u)


def critical_r(model: ScalarModel) -> Optional[float]:
    """Smallest maximal growth rate giving positive fixed points, where a
    closed form exists (sigmoid and scaled Beverton-Holt with delta > 1,
    MSS with d > delta > 1).  ``None`` otherwise."""
    p = model.params
    if model.family in (Family.SIGMOID_BH, Family.SCALED_BH):
        delta = p["delta"]
        if delta <= 1:
            return None
        base = delta * (delta - 1) ** (1 / delta - 1)
        if model.family is Family.SCALED_BH:
            base *= p["a"] ** (1 / delta)
        return base
    if model.family is Family.MSS:
        delta, b, d = p["delta"], p["b"], p["d"]
        if not d > delta > 1:
            return None
        q = delta / (b * (d - delta))
        return q ** ((1 - delta) / d) * (d / (d - delta) + q ** (delta / d))
    return None


def mss_hump(model: ScalarModel) -> Optional[float]:
    """Location of the maximum of an MSS map with d > delta (H'(u) = 0)."""
    p = model.params
    if model.family is not Family.MSS or not p["d"] > p["delta"]:
        return None
    return (p["delta"] / (p["b"] * (p["d"] - p["delta"]))) ** (1 / p["d"])


def mss_polynomial(model: ScalarModel):
    """Coefficients, highest exponent first, of b x^d + x^delta - r x^(delta-1) + 1
    for integer delta and d."""
    p = model.params
    delta, d = p["delta"], p["d"]
    if delta != int(delta) or d != int(d):
        raise ValueError("exponents must be integers")
    delta, d = int(delta), int(d)
    coeffs = np.zeros(max(d, delta) + 1)
    top = len(coeffs) - 1
    coeffs[top - d] += p["b"]
    coeffs[top - delta] += 1.0
    coeffs[top - (delta - 1)] -= p["r"]
    coeffs[top] += 1.0
    return coeffs


@dataclass(frozen=True)
class ScalarRoot:
    value: float
    role: Role
    stability: Stability
    slope: float


@dataclass(frozen=True)
class ScalarEquilibria:
    roots: List[ScalarRoot]
    possibly_missed: bool = False

    @property
    def values(self):
        return [r.value for r in self.roots]

    @property
    def positive(self):
        return [r for r in self.roots if r.value > 0]

    def by_role(self, role):
        return [r for r in self.roots if r.role is Role(role)]


def _classify_slope(slope):
    s = abs(slope)
    if s < 1 - STABILITY_BAND:
        return Stability.STABLE
    if s > 1 + STABILITY_BAND:
        return Stability.UNSTABLE
    return Stability.MARGINAL


def _tangent_candidates(f, grid, values, tol):
    """Grid-local extrema of f that come within ``tol`` of zero without a
    sign change; refined by ternary search on |f|."""
    out = []
    a = np.abs(values)
    mid = a[1:-1]
    local_min = (mid <= a[:-2]) & (mid <= a[2:])
    same_sign = (values[:-2] * values[2:] > 0) & (values[1:-1] * values[:-2] > 0)
    # cheap prefilter: a tangency has a small value relative to its neighbours' spread
    small = mid <= 1e3 * (np.abs(values[2:] - values[:-2]) + tol)
    for k in np.flatnonzero(local_min & same_sign & small):
        i = k + 1
        lo, hi = grid[i - 1], grid[i + 1]
        for _ in range(100):
            m1 = lo + (hi - lo) / 3
            m2 = hi - (hi - lo) / 3
            if abs(f(m1)) < abs(f(m2)):
                hi = m2
            else:
                lo = m1
        u = 0.5 * (lo + hi)
        if abs(f(u)) <= tol:
            out.append(u)
    return out


def fixed_points_1d(H, dH, u_max, n=4096, tol=1e-14, tol_resid=TOL_RESID):
    """Positive fixed points of a 1-D map on (0, u_max].

    Scans ``h(u) - 1 = H(u)/u - 1`` (same sign as ``H(u) - u`` for u > 0),
    refines each sign change with safeguarded Newton and looks for tangential
    (double) roots at grid-local extrema.  Returns ``(roots, possibly_missed)``.
    """

    def g(u):
        return H(u) / u - 1.0

    def dg(u):
        return (dH(u) * u - H(u)) / (u * u)

    grid = np.linspace(0.0, u_max, n + 1)[1:]
    # thresholds can sit far below the first uniform node when delta is near one
    grid = np.concatenate([np.geomspace(1e-300, grid[0], 257)[:-1], grid])
    with np.errstate(all="ignore"):
        values = g(grid)
    brackets = numerics.bracket_scan(g, (grid[0], grid[-1]), grid=grid)
    roots = []
    missed = False
    for br in brackets:
        # relative width stop so tiny thresholds keep full precision
        root = numerics.refine_root(g, br, tol=tol, fprime=dg, xtol=min(tol, 1e-15 * br.hi))
        u = root.value
        if abs(float(H(u)) - u) > tol_resid:
            missed = True
        roots.append(u)
    finite = np.isfinite(values)
    for u in _tangent_candidates(g, grid[finite], values[finite], 1e-12):
        if all(abs(u - v) > 1e-9 * max(1.0, u) for v in roots):
            roots.append(u)
    if len(roots) and max(roots) > 0.99 * u_max:
        missed = True
    return sorted(roots), missed


def find_equilibria_scalar(model: ScalarModel, u_max: Optional[float] = None,
                           tol: float = 1e-14, n: int = 4096) -> ScalarEquilibria:
    """All fixed points of ``model`` in [0, u_max] with roles and stability."""
    if u_max is None:
        u_max = model.default_u_max()
    positives, missed = fixed_points_1d(model._H, model.derivative, u_max, n=n, tol=tol)

    slope0 = model.derivative(0.0)
    origin_stability = _classify_slope(slope0)
    entries = [(0.0, Role.ORIGIN, origin_stability, slope0)]
    slopes = [model.derivative(u) for u in positives]
    stabs = [_classify_slope(s) for s in slopes]
    downward = [i for i, s in enumerate(slopes) if s < 1 - STABILITY_BAND]
    top_down = downward[-1] if downward else None
    for i, u in enumerate(positives):
        role = Role.OTHER
        upward = slopes[i] > 1 + STABILITY_BAND
        larger_stable = any(stabs[j] is Stability.STABLE for j in range(i + 1, len(positives)))
        if (upward and i == 0 and origin_stability is Stability.STABLE and larger_stable):
            role = Role.ALLEE_THRESHOLD
        elif i == top_down:
            role = Role.CARRYING_CAPACITY
        entries.append((u, role, stabs[i], slopes[i]))
    roots = [ScalarRoot(float(u), role, st, float(s)) for u, role, st, s in entries]
    return ScalarEquilibria(roots, missed)


@dataclass(frozen=True)
class AlleeRegime:
    regime: Regime
    r_crit: Optional[float]
    conditions: dict = field(default_factory=dict)


def _a1_holds(model, first_root, u_max, points=64):
    # h increasing on a fixed grid near zero
    scale = 0.1 * (first_root if first_root is not None else u_max)
    grid = np.linspace(0.0, scale, points + 1)[1:]
    h = model.per_capita(grid)
    with np.errstate(all="ignore"):
        dh = (model.derivative(grid) * grid - model._H(grid)) / grid ** 2
    return bool(np.all(dh > 0)) and bool(np.all(np.diff(h) > 0))


def classify_allee(model: ScalarModel, u_max: Optional[float] = None,
                   tol: float = 1e-14) -> AlleeRegime:
    """Strong / weak / no Allee effect from conditions A1-A4 evaluated
    numerically.  Sigmoid and scaled Beverton-Holt maps with delta < 1 are
    reported Weak, as their closed-form analysis states."""
    if u_max is None:
        u_max = model.default_u_max()
    eq = find_equilibria_scalar(model, u_max, tol)
    pos = eq.positive
    h0 = model.per_capita_at_zero()
    first = pos[0].value if pos else None
    a1 = _a1_holds(model, first, u_max)
    far = model.per_capita(np.array([1e3 * u_max, 1e6 * u_max]))
    grid_h = model.per_capita(np.linspace(0.0, u_max, 257)[1:])
    a2 = bool(np.all(grid_h >= 0)) and bool(np.all(far < 1))
    a3 = (len(pos) == 2 and pos[0].slope > 1 and h0 < 1)
    a4 = (len(pos) == 1 and h0 > 1)
    conditions = {"A1": a1, "A2": a2, "A3": a3, "A4": a4}

    if a1 and a2 and a3:
        regime = Regime.STRONG
    elif a1 and a2 and a4:
        regime = Regime.WEAK
    else:
        regime = Regime.NONE
    if model.family in (Family.SIGMOID_BH, Family.SCALED_BH) and model.params["delta"] < 1:
        regime = Regime.WEAK
    if regime is Regime.STRONG and not (len(pos) >= 2 and abs(model.derivative(0.0)) < 1):
        regime = Regime.NONE
    return AlleeRegime(regime, critical_r(model), conditions)


def ricker_closed_form_regime(r, m, b) -> Regime:
    """Parameter test for the Ricker map with predation-saturation Allee effect."""
    if r < m < r * (1 + b) ** 2 / (4 * b) and b > 1:
        return Regime.STRONG
    if b * m > r > m:
        return Regime.WEAK
    return Regime.NONE


@dataclass(frozen=True)
class Trajectory:
    values: np.ndarray
    diverged: bool = False

    def __len__(self):
        return len(self.values)

    def __getitem__(self, item):
        return self.values[item]


def simulate_scalar(model: ScalarModel, u0: float, T: int) -> Trajectory:
    """Orbit ``u0, H(u0), ..., H^T(u0)``.  A non-finite iterate ends the orbit
    early with ``diverged`` set."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if not (math.isfinite(u0) and u0 >= 0):
        raise DomainError("u0 must be finite and nonnegative")
    out = np.empty(T + 1)
    out[0] = u = float(u0)
    for t in range(1, T + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            u = float(model._H(np.float64(u)))
        if not math.isfinite(u):
            return Trajectory(out[:t].copy(), True)
        out[t] = u
    return Trajectory(out)


@dataclass(frozen=True)
class Asymptotics:
    kind: str  # FixedPoint | Cycle | Aperiodic | Undetermined
    index: Optional[int] = None
    period: Optional[int] = None


def asymptotic_class(trajectory, equilibria, tol: float = 1e-6, max_period: int = 64,
                     bound: float = 1e12) -> Asymptotics:
    """Long-run behaviour of an orbit from its last ``4 * max_period`` samples.

    ``equilibria`` is a sequence of points (scalars or 2-vectors) or a
    :class:`ScalarEquilibria`.  Works for scalar and planar orbits.
    """
    values = trajectory.values if isinstance(trajectory, Trajectory) else trajectory
    values = np.asarray(values, dtype=float)
    if isinstance(trajectory, Trajectory) and trajectory.diverged:
        return Asymptotics("Undetermined")
    span = 4 * max_period
    if len(values) < span:
        return Asymptotics("Undetermined")
    tail = values[-span:]
    if not np.all(np.isfinite(tail)):
        return Asymptotics("Undetermined")

    if isinstance(equilibria, ScalarEquilibria):
        points = equilibria.values
    else:
        points = list(equilibria)
    for i, p in enumerate(points):
        dist = np.abs(tail - np.asarray(p, dtype=float))
        if dist.ndim > 1:
            dist = np.max(dist, axis=1)
        if np.max(dist) <= tol:
            return Asymptotics("FixedPoint", index=i)
    period = numerics.cycle_detect(tail, tol, max_period)
    if period is not None and period > 1:
        return Asymptotics("Cycle", period=period)
    if period == 1:
        # stationary tail away from every registered equilibrium
        return Asymptotics("Undetermined")
    if np.max(np.abs(tail)) < bound:
        return Asymptotics("Aperiodic")
    return Asymptotics("Undetermined")
