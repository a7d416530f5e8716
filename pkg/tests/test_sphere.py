"""Quadrature rule construction: normalization, symmetry, exact moments."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremax.sphere import (
    ResourceLimitError,
    build_ball_rule,
    build_circle_rule,
    build_interval_rule,
    build_sector_circle_rule,
    build_sphere_rule,
    dump_rule_csv,
    mc_ball_integral,
    mc_sphere_integral,
    refine,
)


class TestNormalization:
    @pytest.mark.parametrize("m,level", [(2, 6), (3, 4), (4, 3), (5, 2)])
    def test_weights_sum_to_one(self, m, level):
        rule = build_sphere_rule(m, level)
        assert abs(np.sum(rule.weights()) - 1.0) <= 1e-12

    @pytest.mark.parametrize("m,level", [(1, 6), (2, 4), (3, 3)])
    def test_ball_weights_sum_to_one(self, m, level):
        rule = build_ball_rule(m, level)
        assert abs(np.sum(rule.weights()) - 1.0) <= 1e-12

    def test_constant_integrates_to_one(self, sphere3):
        assert sphere3.integrate(lambda y: np.ones(y.shape[0])) == pytest.approx(
            1.0, abs=1e-12)

    @pytest.mark.parametrize("m,level", [(2, 3), (3, 3), (4, 3), (5, 2)])
    def test_nodes_on_sphere(self, m, level):
        rule = build_sphere_rule(m, level)
        pts = rule.points()
        np.testing.assert_allclose(np.sum(pts**2, axis=1), 1.0, atol=1e-12)

    def test_ball_nodes_inside(self, ball2):
        pts = ball2.points()
        assert np.all(np.sum(pts**2, axis=1) <= 1.0 + 1e-12)


class TestMoments:
    def test_circle_y1_squared(self, circle8):
        # average of cos^2 over the circle
        val = circle8.integrate(lambda y: y[:, 0] ** 2)
        assert val == pytest.approx(0.5, abs=1e-10)

    def test_circle_y1_fourth(self, circle8):
        val = circle8.integrate(lambda y: y[:, 0] ** 4)
        assert val == pytest.approx(0.375, abs=1e-10)

    def test_sphere3_y1_squared(self, sphere3):
        val = sphere3.integrate(lambda y: y[:, 0] ** 2)
        assert val == pytest.approx(1.0 / 3.0, abs=1e-8)

    @pytest.mark.parametrize("m,level", [(4, 3), (5, 2)])
    def test_higher_m_symmetry_moment(self, m, level):
        rule = build_sphere_rule(m, level)
        val = rule.integrate(lambda y: y[:, 0] ** 2)
        assert val == pytest.approx(1.0 / m, abs=1e-6)

    def test_interval_y_squared(self, interval10):
        val = interval10.integrate(lambda y: y[:, 0] ** 2)
        assert val == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_ball2_halfplane(self, ball2):
        val = ball2.integrate(lambda y: (y[:, 0] > 0).astype(float))
        assert val == pytest.approx(0.5, abs=1e-8)

    def test_ball2_radius_squared(self, ball2):
        # mean of |y|^2 over the unit disk is 1/2
        val = ball2.integrate(lambda y: np.sum(y**2, axis=1))
        assert val == pytest.approx(0.5, abs=1e-8)

    def test_odd_monomials_vanish(self, sphere3):
        assert abs(sphere3.integrate(lambda y: y[:, 0])) <= 1e-12
        assert abs(sphere3.integrate(lambda y: y[:, 0] * y[:, 1])) <= 1e-12
        assert abs(sphere3.integrate(lambda y: y[:, 2] ** 3)) <= 1e-12

    def test_circle_odd_vanish(self, circle8):
        assert abs(circle8.integrate(lambda y: y[:, 0] * y[:, 1])) <= 1e-12


def _weight_map(pts, w):
    # collapse float-identical nodes up to rounding so set comparison is
    # insensitive to summation order
    acc = {}
    for row, wt in zip(np.round(pts, 10), w):
        key = tuple(row + 0.0)  # normalize -0.0
        acc[key] = acc.get(key, 0.0) + wt
    return acc


class TestSignFlipSymmetry:
    @pytest.mark.parametrize("m", [2, 3])
    def test_node_set_closed_under_sign_flips(self, m):
        rule = build_sphere_rule(m, 3)
        pts = rule.points()
        w = rule.weights()
        base = _weight_map(pts, w)
        for axis in range(m):
            flipped = pts.copy()
            flipped[:, axis] = -flipped[:, axis]
            other = _weight_map(flipped, w)
            assert set(base) == set(other)
            for key, wt in base.items():
                assert other[key] == pytest.approx(wt, rel=1e-12)


class TestRefine:
    def test_node_count_strictly_increases(self):
        rule = build_circle_rule(0)
        for _ in range(2):
            finer = refine(rule)
            assert finer.npoints > rule.npoints
            rule = finer

    def test_y1_fourth_converges(self):
        errs = []
        rule = build_circle_rule(2)
        for _ in range(3):
            errs.append(abs(rule.integrate(lambda y: y[:, 0] ** 4) - 0.375))
            rule = refine(rule)
        assert errs[-1] <= errs[0] + 1e-15

    def test_sphere_refine_increases_nodes(self, sphere3):
        assert refine(sphere3).npoints > sphere3.npoints


class TestSectorConsistency:
    def test_sector_matches_angle_rule(self, circle11):
        sector = build_sector_circle_rule(11)

        def integrand(y):
            return np.exp(y[:, 0]) * np.cos(y[:, 1])

        assert sector.integrate(integrand) == pytest.approx(
            circle11.integrate(integrand), abs=1e-8)


class TestMonteCarlo:
    def test_sphere_mc_within_4se(self, sphere3):
        def integrand(y):
            return np.exp(y[:, 0] + 0.5 * y[:, 1]) * (1.0 + y[:, 2] ** 2)

        exact = sphere3.integrate(integrand)
        mean, se = mc_sphere_integral(integrand, 3, n_samples=100_000, seed=11)
        assert abs(mean - exact) <= 4.0 * se

    def test_ball_mc_within_4se(self, ball2):
        def integrand(y):
            return np.cos(y[:, 0]) + y[:, 1] ** 2

        exact = ball2.integrate(integrand)
        mean, se = mc_ball_integral(integrand, 2, n_samples=100_000, seed=12)
        assert abs(mean - exact) <= 4.0 * se

    def test_mc_is_seeded(self):
        f = lambda y: y[:, 0] ** 2
        a = mc_sphere_integral(f, 2, n_samples=1000, seed=5)
        b = mc_sphere_integral(f, 2, n_samples=1000, seed=5)
        assert a == b


class TestLimitsAndDump:
    def test_circle_cap(self):
        with pytest.raises(ResourceLimitError):
            build_circle_rule(30)

    def test_flat_point_cap(self):
        rule = build_sphere_rule(3, 11, 11)  # 16384 x 16384 virtual nodes
        with pytest.raises(ResourceLimitError):
            rule.points()

    def test_dump_csv(self, tmp_path):
        rule = build_circle_rule(0)
        path = tmp_path / "rule.csv"
        dump_rule_csv(rule, path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == rule.npoints + 1
        assert lines[0].split(",") == ["y1", "y2", "weight"]
        y1, y2, w = (float(v) for v in lines[1].split(","))
        assert y1**2 + y2**2 == pytest.approx(1.0, abs=1e-14)


class TestProperties:
    @given(st.integers(2, 4), st.integers(0, 3))
    @settings(max_examples=20, deadline=None)
    def test_any_rule_normalized(self, m, level):
        rule = build_sphere_rule(m, level)
        assert abs(np.sum(rule.weights()) - 1.0) <= 1e-12

    @given(st.floats(0.1, 2.0), st.floats(-1.0, 1.0))
    @settings(max_examples=25, deadline=None)
    def test_smooth_even_integrand_stable_under_refine(self, scale, shift):
        rule = build_circle_rule(6)

        def integrand(y):
            return np.exp(-scale * (y[:, 0] - shift) ** 2)

        coarse = rule.integrate(integrand)
        fine = refine(rule).integrate(integrand)
        assert fine == pytest.approx(coarse, abs=1e-8)
