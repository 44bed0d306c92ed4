import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from regionsample import (
    RegionPool,
    SrsSpec,
    draw_srs,
    empirical_ci,
    normal_quantile,
    point_estimate,
    relative_error,
    required_sample_size,
    sampled_means,
    z_for_level,
)
from regionsample.samplers import SampleDraw


def constant_pool(value, regions, configs=1):
    return RegionPool(
        "const",
        tuple(f"c{i}" for i in range(configs)),
        np.full((regions, configs), float(value)),
    )


def full_pool_draw(pool):
    n = pool.region_count
    return SampleDraw(scheme="srs", spec=SrsSpec(n=n, seed=0),
                      region_indices=tuple(range(n)))


class TestNormalQuantile:
    def test_against_scipy_grid(self):
        # scipy's ppf is the independent oracle for the rational approximation
        ps = np.concatenate([
            np.array([1e-9, 1e-6, 1e-4, 0.02425, 0.5, 0.97575, 0.9999]),
            np.linspace(0.001, 0.999, 199),
        ])
        for p in ps:
            expected = norm.ppf(p)
            assert normal_quantile(p) == pytest.approx(
                expected, abs=1e-6 * max(1.0, abs(expected))
            )

    def test_z_95(self):
        assert z_for_level(0.95) == pytest.approx(1.959964, abs=1e-6)

    def test_symmetry(self):
        assert normal_quantile(0.3) == pytest.approx(-normal_quantile(0.7), abs=1e-12)

    def test_domain(self):
        for p in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                normal_quantile(p)

    @given(st.floats(min_value=0.5, max_value=0.999), st.floats(min_value=0.0005, max_value=0.4))
    def test_z_strictly_increasing_in_level(self, level, bump):
        if level + bump >= 1.0:
            bump = (1.0 - level) / 2
        assert z_for_level(level + bump) > z_for_level(level)


class TestPointEstimate:
    def test_constant_sample(self):
        pool = constant_pool(2.0, 30)
        est = point_estimate(pool, full_pool_draw(pool), 0)
        assert est.mean == 2.0
        assert est.std == 0.0
        assert est.half_width == 0.0
        assert est.relative_me == 0.0

    def test_fourteen_percent_margin(self):
        # 100 values at 1 +/- d give mean 1.0 and sample std 0.7143 exactly
        d = 0.7143 * math.sqrt(99 / 100)
        values = np.array([1.0 + d, 1.0 - d] * 50).reshape(-1, 1)
        pool = RegionPool("p", ("c0",), values)
        est = point_estimate(pool, full_pool_draw(pool), 0, level=0.95)
        assert est.mean == pytest.approx(1.0)
        assert est.std == pytest.approx(0.7143)
        assert est.relative_me == pytest.approx(0.140, abs=5e-4)

    def test_hand_worked_interval(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        pool = RegionPool("p", ("c0",), np.array(xs).reshape(-1, 1))
        est = point_estimate(pool, full_pool_draw(pool), 0, level=0.95)
        # independent arithmetic: s = sqrt(5/3), ME = z * s / sqrt(4)
        s = math.sqrt(sum((x - 2.5) ** 2 for x in xs) / 3)
        assert est.mean == pytest.approx(2.5)
        assert est.std == pytest.approx(s)
        assert est.half_width == pytest.approx(1.959964 * s / 2, abs=1e-5)
        assert est.half_width == pytest.approx(1.2651, abs=1e-4)

    def test_single_region_no_interval(self):
        pool = constant_pool(3.0, 5)
        draw = SampleDraw(scheme="srs", spec=SrsSpec(n=1, seed=0), region_indices=(2,))
        est = point_estimate(pool, draw, 0)
        assert est.mean == 3.0
        assert est.std is None and est.half_width is None and est.relative_me is None

    def test_level_monotonicity(self, default_pool):
        draw = draw_srs(default_pool, SrsSpec(n=30, seed=4))
        widths = [
            point_estimate(default_pool, draw, 0, level=lvl).half_width
            for lvl in (0.80, 0.90, 0.95, 0.99)
        ]
        assert widths == sorted(widths)
        assert len(set(widths)) == len(widths)

    @pytest.mark.parametrize("n", [4, 10, 100, 1000])
    def test_sample_size_monotonicity(self, n):
        # engineered samples share the same sample std for every n
        d = 0.5 * math.sqrt((n - 1) / n)
        values = np.array([2.0 + d, 2.0 - d] * (n // 2)).reshape(-1, 1)
        pool = RegionPool("p", ("c0",), values)
        est = point_estimate(pool, full_pool_draw(pool), 0)
        assert est.std == pytest.approx(0.5)
        expected = z_for_level(0.95) * 0.5 / math.sqrt(n)
        assert est.half_width == pytest.approx(expected)

    def test_t_mode_wider_than_z(self, default_pool):
        draw = draw_srs(default_pool, SrsSpec(n=10, seed=6))
        z_est = point_estimate(default_pool, draw, 0)
        t_est = point_estimate(default_pool, draw, 0, use_t=True)
        assert t_est.half_width > z_est.half_width

    def test_out_of_range_index_rejected(self, tiny_pool):
        draw = SampleDraw(scheme="srs", spec=SrsSpec(n=1, seed=0), region_indices=(5,))
        with pytest.raises(ValueError, match="out of range"):
            point_estimate(tiny_pool, draw, 0)

    @given(st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=25, deadline=None)
    def test_scale_equivariance(self, lam):
        base = np.array([[1.0], [1.5], [2.5], [3.0]])
        pool = RegionPool("p", ("c0",), base)
        scaled = RegionPool("p", ("c0",), base * lam)
        draw = full_pool_draw(pool)
        a = point_estimate(pool, draw, 0)
        b = point_estimate(scaled, draw, 0)
        assert b.mean == pytest.approx(lam * a.mean, rel=1e-9)
        assert b.std == pytest.approx(lam * a.std, rel=1e-9)
        assert b.half_width == pytest.approx(lam * a.half_width, rel=1e-9)
        assert b.relative_me == pytest.approx(a.relative_me, rel=1e-9)


class TestRelativeError:
    def test_exact_match(self):
        assert relative_error(2.0, 2.0) == 0.0

    def test_worst_single_draw(self):
        assert relative_error(1.35, 1.0) == pytest.approx(0.35)

    def test_underestimate(self):
        assert relative_error(0.9, 1.2) == pytest.approx(0.25)

    def test_nonpositive_truth(self):
        with pytest.raises(ValueError, match="positive"):
            relative_error(1.0, 0.0)


class TestEmpiricalCI:
    def test_zero_variance_pool(self):
        pool = constant_pool(1.5, 40)
        ci = empirical_ci(pool, SrsSpec(n=5), 0, trials=200, master_seed=1)
        assert ci.half_width == 0.0
        assert ci.relative_half_width == 0.0
        assert ci.center == 1.5

    def test_minimum_trials_enforced(self, default_pool):
        with pytest.raises(ValueError, match="at least 100"):
            empirical_ci(default_pool, SrsSpec(n=5), 0, trials=99, master_seed=1)

    def test_deterministic(self, default_pool):
        a = empirical_ci(default_pool, SrsSpec(n=10), 0, trials=150, master_seed=9)
        b = empirical_ci(default_pool, SrsSpec(n=10), 0, trials=150, master_seed=9)
        assert a == b

    def test_center_near_truth(self, default_pool):
        from regionsample import true_mean

        ci = empirical_ci(default_pool, SrsSpec(n=30), 0, trials=400, master_seed=2)
        assert ci.center == pytest.approx(true_mean(default_pool, 0), rel=0.02)
        assert ci.scheme == "srs(n=30)"

    def test_trial_order_independent_of_collection(self, default_pool):
        # trial t's mean is a pure function of (master_seed, t)
        all_means = sampled_means(default_pool, SrsSpec(n=5), 0, 50, master_seed=3)
        tail = sampled_means(default_pool, SrsSpec(n=5), 0, 30, master_seed=3)
        assert np.array_equal(all_means[:30], tail)


class TestRequiredSampleSize:
    def test_three_percent_target(self):
        assert required_sample_size(0.7143, 0.03, 0.95) == 2178

    def test_zero_dispersion(self):
        assert required_sample_size(0.0, 0.03) == 0

    def test_bad_target(self):
        with pytest.raises(ValueError):
            required_sample_size(0.5, 0.0)
