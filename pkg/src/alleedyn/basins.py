"""Basins of attraction on a grid, the attractor registry, and the extinction
and persistence regions with sampled containment checks."""

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
from scipy import ndimage

from . import _kernels, numerics
from .errors import HypothesisError
from .planar import PlanarMap, StabilityClass, condition_h1, equilibria
from .scalar import ScalarModel, critical_r, find_equilibria_scalar

MATCH_RADIUS = 1e-6
CONFIRM_STEPS = 10
UNDETERMINED = -1


class AttractorKind(str, Enum):
    E0 = "BoundaryE0"
    EXK = "BoundaryExK"
    EYK = "BoundaryEyK"
    INTERIOR = "Interior"
    CYCLE = "Cycle"
    APERIODIC = "Aperiodic"


_ROLE_KIND = {"E0": AttractorKind.E0, "ExK": AttractorKind.EXK, "EyK": AttractorKind.EYK,
              "Interior": AttractorKind.INTERIOR}


@dataclass(frozen=True)
class Attractor:
    id: int
    kind: AttractorKind
    points: np.ndarray
    radius: float

    @property
    def point(self):
        return self.points[0]


@dataclass
class AttractorRegistry:
    entries: List[Attractor]
    match_radius: float = MATCH_RADIUS

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def kinds(self):
        return [e.kind for e in self.entries]

    def find(self, kind):
        """Id of the first entry of ``kind``, or None."""
        for e in self.entries:
            if e.kind == kind:
                return e.id
        return None

    def arrays(self):
        """Flattened (points, ids, radii) for the kernels."""
        pts = np.concatenate([e.points for e in self.entries]) if self.entries else np.zeros((0, 2))
        ids = np.concatenate([np.full(len(e.points), e.id, dtype=np.int64) for e in self.entries]) \
            if self.entries else np.zeros(0, dtype=np.int64)
        radii = np.concatenate([np.full(len(e.points), e.radius) for e in self.entries]) \
            if self.entries else np.zeros(0)
        return np.ascontiguousarray(pts, dtype=np.float64), ids, radii


def _probe_window(m: PlanarMap):
    if m.is_bh:
        r1, r2 = m.bh_params()[:2]
        return (0.0, 1.2 * r1, 0.0, 1.2 * r2)
    return (0.0, 2.0, 0.0, 2.0)


def build_registry(m: PlanarMap, candidates=None, match_radius=MATCH_RADIUS, probe=True,
                   probe_resolution=24, probe_steps=3000, window=None) -> AttractorRegistry:
    """Registry of the stable fixed points among ``candidates`` (all located
    equilibria by default) plus cycles or aperiodic sets found by probe
    orbits whose tails match no registered point."""
    if candidates is None:
        candidates = [e for e in equilibria(m).all]
    entries: List[Attractor] = []

    def clashes(pts, radius):
        for e in entries:
            d = np.min(np.linalg.norm(e.points[:, None, :] - pts[None, :, :], axis=-1))
            if d <= 2 * max(radius, e.radius):
                return e
        return None

    for c in candidates:
        if c.stability is not StabilityClass.SINK:
            continue
        pts = np.array([[c.x, c.y]])
        other = clashes(pts, match_radius)
        if other is not None:
            warnings.warn(f"candidate ({c.x}, {c.y}) merged into attractor {other.id}",
                          RuntimeWarning, stacklevel=2)
            continue
        entries.append(Attractor(len(entries), _ROLE_KIND.get(c.role, AttractorKind.INTERIOR),
                                 pts, match_radius))

    if probe:
        _probe(m, entries, clashes, match_radius, probe_resolution, probe_steps,
               window or _probe_window(m))
    return AttractorRegistry(entries, match_radius)


def _probe(m, entries, clashes, match_radius, n, steps, window, max_period=64):
    keep = 4 * max_period
    xs = window[0] + (np.arange(n) + 0.5) * (window[1] - window[0]) / n
    ys = window[2] + (np.arange(n) + 0.5) * (window[3] - window[2]) / n
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    code, p = m.kernel_args()
    tails = np.empty((X.size, keep, 2))
    _kernels.orbit_tails(code, p, X.ravel().copy(), Y.ravel().copy(), steps, keep, tails)
    for tail in tails:
        if not np.all(np.isfinite(tail)):
            continue
        last = tail[-1]
        near = [np.min(np.linalg.norm(e.points - last, axis=1)) for e in entries]
        # still approaching a known attractor
        if near and min(near) < 1e-3:
            continue
        period = numerics.cycle_detect(tail, 1e-9, max_period)
        if period == 1:
            continue  # an unregistered fixed point: a saddle reached along its stable set
        if period is not None:
            pts = tail[-period:].copy()
            if clashes(pts, match_radius) is None:
                entries.append(Attractor(len(entries), AttractorKind.CYCLE, pts, match_radius))
            continue
        pts = tail[::4].copy()
        spread = float(np.max(np.ptp(pts, axis=0)))
        radius = max(0.02 * spread, match_radius)
        if clashes(pts, radius) is None:
            entries.append(Attractor(len(entries), AttractorKind.APERIODIC, pts, radius))


def _classify(m, registry, xs, ys, max_steps, threads=None):
    _kernels.set_threads(threads)
    code, p = m.kernel_args()
    pts, ids, radii = registry.arrays()
    labels = np.empty(xs.size, dtype=np.int64)
    steps = np.empty(xs.size, dtype=np.int64)
    _kernels.classify_points(code, p, np.ascontiguousarray(xs, dtype=np.float64),
                             np.ascontiguousarray(ys, dtype=np.float64),
                             pts, ids, radii, int(max_steps), CONFIRM_STEPS, labels, steps)
    return labels, steps


def classify_orbit(m: PlanarMap, s0, registry: AttractorRegistry, max_steps=5000, tol=None):
    """Registry id capturing the orbit of ``s0`` for ten consecutive steps,
    or None (Undetermined) after ``max_steps``."""
    if tol is not None:
        registry = AttractorRegistry(
            [Attractor(e.id, e.kind, e.points, tol) for e in registry.entries], tol)
    labels, _ = _classify(m, registry, np.array([float(s0[0])]), np.array([float(s0[1])]), max_steps)
    label = int(labels[0])
    return None if label == UNDETERMINED else label


@dataclass
class BasinRaster:
    window: tuple
    resolution: tuple
    labels: np.ndarray
    budget: tuple
    registry: AttractorRegistry
    steps: Optional[np.ndarray] = None

    @property
    def xs(self):
        x_lo, x_hi = self.window[0], self.window[1]
        return x_lo + (np.arange(self.resolution[0]) + 0.5) * (x_hi - x_lo) / self.resolution[0]

    @property
    def ys(self):
        y_lo, y_hi = self.window[2], self.window[3]
        return y_lo + (np.arange(self.resolution[1]) + 0.5) * (y_hi - y_lo) / self.resolution[1]

    def undetermined_fraction(self):
        return float(np.mean(self.labels == UNDETERMINED))

    def label_set(self):
        return sorted(int(v) for v in np.unique(self.labels) if v != UNDETERMINED)

    def kind_set(self):
        return {self.registry[i].kind for i in self.label_set()}

    def areas(self):
        cell = ((self.window[1] - self.window[0]) / self.resolution[0]
                * (self.window[3] - self.window[2]) / self.resolution[1])
        return {int(v): int(c) * cell for v, c in zip(*np.unique(self.labels, return_counts=True))}


def basin_grid(m: PlanarMap, registry: AttractorRegistry, window=(0.0, 4.0, 0.0, 4.0),
               resolution=(200, 200), budget=(5000, None), threads=None) -> BasinRaster:
    """Classify every cell center of ``window`` at ``resolution``.
    ``labels[i, j]`` belongs to x-index i and y-index j."""
    window = tuple(float(v) for v in window)
    if min(window) < 0 or window[1] <= window[0] or window[3] <= window[2]:
        raise ValueError(f"window {window} must be a nonempty box in the closed positive quadrant")
    nx, ny = int(resolution[0]), int(resolution[1])
    max_steps, tol = budget
    if tol is not None:
        registry = AttractorRegistry(
            [Attractor(e.id, e.kind, e.points, tol) for e in registry.entries], tol)
    raster = BasinRaster(window, (nx, ny), np.empty((nx, ny), dtype=np.int64),
                         (int(max_steps), registry.match_radius), registry)
    X, Y = np.meshgrid(raster.xs, raster.ys, indexing="ij")
    labels, steps = _classify(m, registry, X.ravel(), Y.ravel(), max_steps, threads)
    raster.labels = labels.reshape(nx, ny)
    raster.steps = steps.reshape(nx, ny)
    return raster


# ----------------------------------------------------------------------------
# topology

_FOUR = ndimage.generate_binary_structure(2, 1)


def components(labels, label):
    """(component index array, count) of the 4-connected pieces of ``label``."""
    labels = labels.labels if isinstance(labels, BasinRaster) else np.asarray(labels)
    return ndimage.label(labels == label, structure=_FOUR)


def component_count(raster, label) -> int:
    return int(components(raster, label)[1])


def touches_far_edge(raster, label) -> bool:
    """Whether ``label`` reaches the x = x_hi column or the y = y_hi row."""
    labels = raster.labels if isinstance(raster, BasinRaster) else np.asarray(raster)
    return bool(np.any(labels[-1, :] == label) or np.any(labels[:, -1] == label))


def topology_summary(raster: BasinRaster):
    out = {"undetermined_fraction": raster.undetermined_fraction(), "labels": {}}
    areas = raster.areas()
    for i in raster.label_set():
        entry = raster.registry[i]
        out["labels"][i] = {
            "kind": entry.kind.value,
            "point": [float(v) for v in entry.point],
            "area": areas[i],
            "components": component_count(raster, i),
            "touches_far_edge": touches_far_edge(raster, i),
        }
    return out


# ----------------------------------------------------------------------------
# regions

class Region(str, Enum):
    OEX = "Oex"
    OEY = "Oey"
    O0 = "O0"
    OX = "Ox"
    OY = "Oy"
    OEXL = "OexL"
    OEYL = "OeyL"
    O0L = "O0L"


@dataclass(frozen=True)
class RegionSpec:
    region: Region
    constants: dict
    params: tuple = field(repr=False, default=())

    def contains(self, s):
        return region_contains(self, s)


def condition_h2(m: PlanarMap, axis=0):
    """H2 (axis 0) or H3 (axis 1): the axis map slowed down by the
    competitor's Allee-threshold density keeps a strong Allee effect.
    Returns (holds, a, r_crit^a)."""
    r1, r2, b1, b2, d1, d2, d3, d4 = m.bh_params()
    A1 = find_equilibria_scalar(ScalarModel.sigmoid_bh(r1, d1)).positive[0].value
    A2 = find_equilibria_scalar(ScalarModel.sigmoid_bh(r2, d2)).positive[0].value
    if axis == 0:
        r, d, a = r1, d1, 1 + b1 * A2 ** d3
    else:
        r, d, a = r2, d2, 1 + b2 * A1 ** d4
    rc = critical_r(ScalarModel.scaled_bh(r, a, d))
    return d > 1 and rc is not None and r > rc, a, rc


def region_spec(m: PlanarMap, region, lobe="derived") -> RegionSpec:
    """Constants for ``region``; raises :class:`HypothesisError` when the
    region needs a hypothesis the map does not satisfy.

    ``lobe`` picks the far-lobe bound.  "derived" solves
    r1 / (1 + b1 k^d3 x^(d3-d1)) < A1 for x, which puts A1 in the
    denominator; "printed" drops that factor and admits points whose
    next iterate exceeds A1.
    """
    if lobe not in ("derived", "printed"):
        raise ValueError(f"lobe must be 'derived' or 'printed', got {lobe!r}")
    region = Region(region)
    if not m.is_bh:
        raise TypeError("regions are defined for the Beverton-Holt families")
    if not condition_h1(m):
        raise HypothesisError("H1")
    params = m.bh_params()
    r1, r2, b1, b2, d1, d2, d3, d4 = params
    A1 = find_equilibria_scalar(ScalarModel.sigmoid_bh(r1, d1)).positive[0].value
    A2 = find_equilibria_scalar(ScalarModel.sigmoid_bh(r2, d2)).positive[0].value
    K1 = find_equilibria_scalar(ScalarModel.sigmoid_bh(r1, d1)).positive[-1].value
    K2 = find_equilibria_scalar(ScalarModel.sigmoid_bh(r2, d2)).positive[-1].value
    const = {"A1": A1, "A2": A2, "K1": K1, "K2": K2,
             "lobe_x": A1 if lobe == "derived" else 1.0,
             "lobe_y": A2 if lobe == "derived" else 1.0}
    if region is Region.OX:
        holds, a1, _ = condition_h2(m, 0)
        if not holds:
            raise HypothesisError("H2")
        const.update(a1=a1, A1a1=find_equilibria_scalar(
            ScalarModel.scaled_bh(r1, a1, d1)).positive[0].value)
    if region is Region.OY:
        holds, a2, _ = condition_h2(m, 1)
        if not holds:
            raise HypothesisError("H3")
        const.update(a2=a2, A2a2=find_equilibria_scalar(
            ScalarModel.scaled_bh(r2, a2, d2)).positive[0].value)
    if region in (Region.OEXL, Region.O0L) and not d3 > d1:
        raise HypothesisError("delta3>delta1")
    if region in (Region.OEYL, Region.O0L) and not d4 > d2:
        raise HypothesisError("delta4>delta2")
    return RegionSpec(region, const, params)


def _lobe_x(spec, x, y):
    # x > ((r1 - A1) / (s b1 k^d3))^(1 / (d3 - d1)) with k = y / x, s = A1 or 1
    r1, _, b1, _, d1, _, d3, _ = spec.params
    A1, s = spec.constants["A1"], spec.constants["lobe_x"]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = y / x
        bound = ((r1 - A1) / (s * b1 * k ** d3)) ** (1 / (d3 - d1))
        return (x > 0) & (y > 0) & (x > bound)


def _lobe_y(spec, x, y):
    _, r2, _, b2, _, d2, _, d4 = spec.params
    A2, s = spec.constants["A2"], spec.constants["lobe_y"]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = x / y
        bound = ((r2 - A2) / (s * b2 * k ** d4)) ** (1 / (d4 - d2))
        return (x > 0) & (y > 0) & (y > bound)


def region_mask(spec: RegionSpec, x, y):
    """Vectorized membership test."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = spec.constants
    quad = (x >= 0) & (y >= 0)
    reg = spec.region
    if reg is Region.O0:
        return quad & (x <= c["A1"]) & (y <= c["A2"])
    if reg is Region.OEX:
        return quad & (x < c["A1"])
    if reg is Region.OEY:
        return quad & (y < c["A2"])
    if reg is Region.OX:
        return quad & (x > c["A1a1"]) & (y < c["A2"])
    if reg is Region.OY:
        return quad & (x < c["A1"]) & (y > c["A2a2"])
    if reg is Region.OEXL:
        return _lobe_x(spec, x, y)
    if reg is Region.OEYL:
        return _lobe_y(spec, x, y)
    return _lobe_x(spec, x, y) & _lobe_y(spec, x, y)


def region_contains(spec: RegionSpec, s) -> bool:
    return bool(region_mask(spec, s[0], s[1]))


def region_target(spec: RegionSpec):
    """(mode, point, description) of the limit the theorems assert:
    mode 0 is convergence to a point, 1 is x -> 0, 2 is y -> 0."""
    c = spec.constants
    reg = spec.region
    if reg in (Region.O0, Region.O0L):
        return 0, (0.0, 0.0), "E0"
    if reg in (Region.OEX, Region.OEXL):
        return 1, (0.0, 0.0), "x->0"
    if reg in (Region.OEY, Region.OEYL):
        return 2, (0.0, 0.0), "y->0"
    if reg is Region.OX:
        return 0, (c["K1"], 0.0), "ExK"
    return 0, (0.0, c["K2"]), "EyK"


def sampling_box(spec: RegionSpec):
    """Box the containment check samples from: [0, 1.5 r1] x [0, 1.5 r2],
    widened for the far lobes so they are reachable, cut down to the
    region's own bounds where it has them."""
    r1, r2, b1, b2, d1, d2, d3, d4 = spec.params
    c = spec.constants
    x_hi, y_hi = 1.5 * r1, 1.5 * r2
    reg = spec.region
    if reg in (Region.OEXL, Region.O0L):
        edge = 2 * ((r1 - c["A1"]) / (c["lobe_x"] * b1)) ** (1 / (d3 - d1))
        x_hi, y_hi = max(x_hi, edge), max(y_hi, edge)
    if reg in (Region.OEYL, Region.O0L):
        edge = 2 * ((r2 - c["A2"]) / (c["lobe_y"] * b2)) ** (1 / (d4 - d2))
        x_hi, y_hi = max(x_hi, edge), max(y_hi, edge)
    if reg in (Region.O0, Region.OEX, Region.OY):
        x_hi = c["A1"]
    if reg in (Region.O0, Region.OEY, Region.OX):
        y_hi = c["A2"]
    return (0.0, x_hi, 0.0, y_hi)


def sample_region(spec: RegionSpec, n, rng, box=None):
    """``n`` uniform points of the region inside ``box`` by rejection."""
    box = box or sampling_box(spec)
    out = np.empty((0, 2))
    for _ in range(1000):
        if len(out) >= n:
            break
        draw = np.column_stack([rng.uniform(box[0], box[1], 4 * n),
                                rng.uniform(box[2], box[3], 4 * n)])
        out = np.concatenate([out, draw[region_mask(spec, draw[:, 0], draw[:, 1])]])
    return out[:n]


@dataclass
class ContainmentReport:
    region: str
    target: str
    samples: int
    violations: list

    @property
    def ok(self):
        return self.samples > 0 and not self.violations


def verify_containment(m: PlanarMap, spec: RegionSpec, samples=10_000, seed=0, points=None,
                       max_steps=5000, tol=1e-6, threads=None) -> ContainmentReport:
    """Iterate sampled points of the region and list those whose orbit does
    not reach the region's asserted limit within ``max_steps``.  An empty
    violation list is a pass; each violation carries its start, final state
    and first orbit steps."""
    if points is None:
        points = sample_region(spec, samples, np.random.default_rng(seed))
    else:
        points = np.asarray(points, dtype=float)
        points = points[region_mask(spec, points[:, 0], points[:, 1])]
    mode, target, name = region_target(spec)
    _kernels.set_threads(threads)
    code, p = m.kernel_args()
    ok = np.empty(len(points), dtype=np.bool_)
    final = np.empty((len(points), 2))
    _kernels.reach_target(code, p, np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1]),
                          mode, float(target[0]), float(target[1]), tol, int(max_steps),
                          CONFIRM_STEPS, ok, final)
    violations = []
    for i in np.flatnonzero(~ok):
        violations.append({"start": points[i].tolist(), "final": final[i].tolist(),
                           "orbit": _kernels.orbit(code, p, points[i, 0], points[i, 1], 20).tolist()})
    return ContainmentReport(spec.region.value, name, int(len(points)), violations)
