import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alleedyn.basins import (UNDETERMINED, AttractorKind, Region, basin_grid, build_registry,
                             classify_orbit, component_count, condition_h2, region_contains,
                             region_mask, region_spec, sample_region, topology_summary,
                             touches_far_edge, verify_containment)
from alleedyn.errors import HypothesisError
from alleedyn.planar import PlanarMap, step
from alleedyn.suites import draw_h1, figure_map

import oracles


@pytest.fixture(scope="module")
def fig5():
    return figure_map("fig5")


@pytest.fixture(scope="module")
def fig9():
    return figure_map("fig9")


class TestRegistry:
    def test_fig5_boundary_only(self, fig5):
        reg = build_registry(fig5)
        assert reg.kinds() == [AttractorKind.E0, AttractorKind.EXK, AttractorKind.EYK]
        np.testing.assert_allclose(reg[1].point, [2, 0], atol=1e-12)

    def test_fig9_interior_sink(self, fig9):
        reg = build_registry(fig9)
        assert len(reg) == 4
        inner = reg[reg.find(AttractorKind.INTERIOR)]
        np.testing.assert_allclose(inner.point, [1.841989, 1.841989], atol=1e-6)

    def test_decoupled_product(self):
        reg = build_registry(PlanarMap.general_bh(2.5, 2.5, 1e-9, 1e-9, 2, 2, 5, 5))
        pts = sorted(tuple(np.round(e.point, 4)) for e in reg.entries)
        assert pts == [(0.0, 0.0), (0.0, 2.0), (2.0, 0.0), (2.0, 2.0)]

    def test_find_missing(self, fig5):
        assert build_registry(fig5).find(AttractorKind.INTERIOR) is None

    def test_probe_adds_nothing_when_sinks_cover(self, fig9):
        assert build_registry(fig9).kinds() == build_registry(fig9, probe=False).kinds()


class TestClassifyOrbit:
    @pytest.mark.parametrize("s0,kind", [((0.1, 0.1), AttractorKind.E0),
                                         ((3.0, 0.2), AttractorKind.EXK),
                                         ((0.2, 3.0), AttractorKind.EYK),
                                         ((2.0, 0.0), AttractorKind.EXK)])
    def test_fig5_examples(self, fig5, s0, kind):
        reg = build_registry(fig5)
        assert reg[classify_orbit(fig5, s0, reg)].kind is kind

    def test_fig9_interior(self, fig9):
        reg = build_registry(fig9)
        assert reg[classify_orbit(fig9, (1.5, 1.5), reg)].kind is AttractorKind.INTERIOR

    def test_budget_exhausted_is_none(self, fig9):
        reg = build_registry(fig9)
        assert classify_orbit(fig9, (1.5, 1.5), reg, max_steps=2) is None

    def test_unstable_point_stays_undetermined(self, fig9):
        reg = build_registry(fig9)
        # the diagonal source is fixed, so its orbit never moves
        assert classify_orbit(fig9, (0.500209, 0.500209), reg, max_steps=50) is None


class TestBasinGrid:
    def test_deterministic(self, fig9):
        reg = build_registry(fig9)
        a = basin_grid(fig9, reg, resolution=(40, 40))
        b = basin_grid(fig9, reg, resolution=(40, 40))
        assert np.array_equal(a.labels, b.labels)

    def test_symmetric_raster(self, fig9):
        reg = build_registry(fig9)
        r = basin_grid(fig9, reg, resolution=(60, 60))
        swap = {reg.find(AttractorKind.EXK): reg.find(AttractorKind.EYK),
                reg.find(AttractorKind.EYK): reg.find(AttractorKind.EXK)}
        mirrored = np.vectorize(lambda v: swap.get(v, v))(r.labels.T)
        # cells on the diagonal hit the stable manifold of a saddle symmetrically
        assert np.mean(mirrored != r.labels) < 0.01

    def test_cell_centres(self, fig5):
        r = basin_grid(fig5, build_registry(fig5), (0, 4, 0, 2), (4, 2))
        np.testing.assert_allclose(r.xs, [0.5, 1.5, 2.5, 3.5])
        np.testing.assert_allclose(r.ys, [0.5, 1.5])
        assert r.labels.shape == (4, 2)

    def test_matches_longdouble_oracle(self, fig9):
        reg = build_registry(fig9)
        window, res = (0, 4, 0, 4), (24, 24)
        r = basin_grid(fig9, reg, window, res)
        ref = oracles.basin_labels("general-bh", fig9.params, [e.point for e in reg.entries],
                                   window, res)
        ids = np.array([e.id for e in reg.entries])
        assert np.mean(r.labels != np.where(ref >= 0, ids[ref], UNDETERMINED)) <= 2 / (24 * 24)

    def test_rejects_bad_window(self, fig5):
        with pytest.raises(ValueError):
            basin_grid(fig5, build_registry(fig5), (-1, 4, 0, 4), (10, 10))

    @pytest.mark.parametrize("name,b", [("fig6", 15), ("fig8", 0.05), ("fig10", 0.01)])
    def test_undetermined_small(self, name, b):
        m = PlanarMap.symmetric_bh(2.5, b, 2, 5)
        r = basin_grid(m, build_registry(m), resolution=(100, 100))
        assert r.undetermined_fraction() < 0.01

    def test_summary_fields(self, fig9):
        r = basin_grid(fig9, build_registry(fig9), resolution=(50, 50))
        s = topology_summary(r)
        areas = sum(v["area"] for v in s["labels"].values())
        np.testing.assert_allclose(areas, 16 * (1 - s["undetermined_fraction"]))
        assert all(v["components"] >= 1 for v in s["labels"].values())


class TestTopology:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 30), st.integers(1, 30))
    def test_components_match_bfs(self, seed, nx, ny):
        labels = np.random.default_rng(seed).integers(0, 3, (nx, ny))
        for v in range(3):
            assert component_count(labels, v) == oracles.bfs_components(labels == v)

    def test_diagonal_not_connected(self):
        labels = np.eye(3, dtype=int)
        assert component_count(labels, 1) == 3

    def test_far_edge(self):
        labels = np.zeros((4, 4), dtype=int)
        labels[1:3, 1:3] = 1
        assert not touches_far_edge(labels, 1)
        labels[3, 1] = 1
        assert touches_far_edge(labels, 1)


class TestRegions:
    def test_o0_box(self, fig5):
        s = region_spec(fig5, Region.O0)
        assert region_contains(s, (0.4, 0.4)) and not region_contains(s, (0.6, 0.4))

    def test_h2_constants(self, fig9):
        holds, a1, rc = condition_h2(fig9)
        assert holds
        np.testing.assert_allclose(a1, 1 + 0.01 * 0.5 ** 5)
        np.testing.assert_allclose(rc, 2 * np.sqrt(a1), rtol=1e-12)

    def test_h2_holds_fig5(self, fig5):
        # a1 = 1 + 15 / 32 keeps r_crit^a1 = 2 sqrt(a1) below 2.5
        assert condition_h2(fig5)[0]

    def test_h2_fails_strong_competition(self):
        with pytest.raises(HypothesisError):
            region_spec(PlanarMap.general_bh(2.5, 2.5, 100, 100, 2, 2, 5, 5), Region.OX)

    def test_h1_needed(self):
        with pytest.raises(HypothesisError):
            region_spec(PlanarMap.general_bh(1.9, 2.5, 0.01, 0.01, 2, 2, 5, 5), Region.O0)

    def test_lobe_needs_exponent_order(self):
        with pytest.raises(HypothesisError):
            region_spec(PlanarMap.general_bh(2.5, 2.5, 1, 1, 2, 2, 2, 5), Region.OEXL)

    def test_scramble_rejected(self):
        with pytest.raises(TypeError):
            region_spec(PlanarMap.scramble_mating(2, 0.5, 3), Region.O0)

    def test_far_lobe_examples(self, fig5):
        derived = region_spec(fig5, Region.OEXL)
        printed = region_spec(fig5, Region.OEXL, lobe="printed")
        # on the diagonal the printed bound is (2 / 15)^(1/3), the derived one (4 / 15)^(1/3)
        for spec, edge in ((printed, (2 / 15) ** (1 / 3)), (derived, (4 / 15) ** (1 / 3))):
            assert not region_contains(spec, (0.999 * edge, 0.999 * edge))
            assert region_contains(spec, (1.001 * edge, 1.001 * edge))

    def test_printed_lobe_counterexample(self, fig5):
        s0 = (2.13775, 1.02494)
        printed = region_spec(fig5, Region.OEXL, lobe="printed")
        assert region_contains(printed, s0)
        assert not region_contains(region_spec(fig5, Region.OEXL), s0)
        rep = verify_containment(fig5, printed, points=np.array([s0]))
        assert len(rep.violations) == 1
        np.testing.assert_allclose(rep.violations[0]["final"], [2, 0], atol=1e-6)

    @pytest.mark.parametrize("region", [Region.O0, Region.OEX, Region.OEY, Region.OEXL,
                                        Region.OEYL, Region.O0L])
    def test_fig5_containment(self, fig5, region):
        rep = verify_containment(fig5, region_spec(fig5, region), samples=2000, seed=1)
        assert rep.samples == 2000 and rep.ok

    @pytest.mark.parametrize("region", [Region.OX, Region.OY])
    def test_fig9_side_regions(self, fig9, region):
        rep = verify_containment(fig9, region_spec(fig9, region), samples=2000, seed=1)
        assert rep.ok

    def test_samples_inside(self, fig5, rng):
        spec = region_spec(fig5, Region.O0L)
        pts = sample_region(spec, 500, rng)
        assert len(pts) == 500 and region_mask(spec, pts[:, 0], pts[:, 1]).all()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_o0_forward_invariant(self, seed):
        rng = np.random.default_rng(seed)
        m = draw_h1(rng)
        spec = region_spec(m, Region.O0)
        pts = sample_region(spec, 200, rng)
        out = step(m, pts)
        assert region_mask(spec, out[:, 0], out[:, 1]).all()

    def test_ball_absorbed(self, fig5, rng):
        # points near the origin fall into E0 for every map satisfying H1
        reg = build_registry(fig5)
        for s0 in rng.uniform(0, 0.3, (50, 2)):
            assert reg[classify_orbit(fig5, s0, reg)].kind is AttractorKind.E0
