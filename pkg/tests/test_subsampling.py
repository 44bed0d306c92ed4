import itertools

import numpy as np
import pytest

from regionsample import (
    BaselineMean,
    CandidateSet,
    ChebyshevRelative,
    CorrelationMax,
    RegionPool,
    SrsSpec,
    SyntheticSpec,
    derive_seed,
    draw_srs,
    empirical_ci,
    evaluate_generalization,
    generate_candidates,
    generate_synthetic,
    pool_summary,
    select_subsample,
    true_mean,
)
from regionsample.samplers import SampleDraw
from regionsample.subsampling import candidate_config_means


def manual_candidates(pool, index_sets):
    n = len(index_sets[0])
    draws = tuple(
        SampleDraw(scheme="srs", spec=SrsSpec(n=n, seed=0), region_indices=tuple(s))
        for s in index_sets
    )
    return CandidateSet(scheme=SrsSpec(n=n, seed=0), trials=len(draws), draws=draws,
                        master_seed=0)


def toy_walkthrough_pool():
    """Seven configs, true mean 1.0 everywhere, three interesting regions.

    Regions 0..2 encode the three candidate subsamples' error patterns
    (max training errors 8%, 7%, 4%; the third has a 5% worst test error);
    regions 3..5 mirror them so every column mean is exactly 1.
    """
    r0 = [1.08, 1.02, 0.99, 1.01, 1.03, 0.98, 1.02]
    r1 = [1.01, 0.93, 1.05, 1.02, 0.97, 1.04, 0.98]
    r2 = [1.04, 0.98, 1.01, 1.05, 1.02, 0.99, 1.01]
    mirrors = [[2.0 - v for v in row] for row in (r0, r1, r2)]
    values = np.array([r0, r1, r2, *mirrors])
    pool = RegionPool("toy", tuple(f"config{i}" for i in range(7)), values)
    candidates = manual_candidates(pool, [(0,), (1,), (2,)])
    return pool, candidates


class TestGenerateCandidates:
    def test_single_trial_equals_direct_draw(self, default_pool):
        cands = generate_candidates(default_pool, SrsSpec(n=4), 1, master_seed=6)
        direct = draw_srs(
            default_pool, SrsSpec(n=4, seed=derive_seed(6, "candidate", 0))
        )
        assert cands.draws[0] == direct

    def test_deterministic(self, default_pool):
        a = generate_candidates(default_pool, SrsSpec(n=30), 50, master_seed=1)
        b = generate_candidates(default_pool, SrsSpec(n=30), 50, master_seed=1)
        assert a == b

    def test_shapes(self, default_pool):
        cands = generate_candidates(default_pool, SrsSpec(n=30), 40, master_seed=2)
        assert cands.trials == 40
        assert all(d.sample_size == 30 for d in cands.draws)

    def test_mixed_sizes_rejected(self, pool_six):
        d2 = draw_srs(pool_six, SrsSpec(n=2, seed=0))
        d3 = draw_srs(pool_six, SrsSpec(n=3, seed=0))
        with pytest.raises(ValueError, match="sample size"):
            CandidateSet(scheme=SrsSpec(n=2), trials=2, draws=(d2, d3), master_seed=0)


class TestSelectSubsample:
    def test_chebyshev_walkthrough(self):
        pool, candidates = toy_walkthrough_pool()
        report = select_subsample(pool, candidates, ChebyshevRelative((0, 1, 2)))
        assert report.winning_index == 2
        assert report.criterion_value == pytest.approx(0.04, abs=1e-12)
        assert report.max_training_error == pytest.approx(0.04, abs=1e-12)
        assert report.test_configs == (3, 4, 5, 6)
        assert report.max_test_error == pytest.approx(0.05, abs=1e-12)
        # worst held-out config is the first test config
        assert report.test_errors[0] == pytest.approx(0.05, abs=1e-12)

    def test_baseline_brute_force(self):
        # exhaustive oracle: all 6 pairs from a 4-region pool
        values = np.array([[1.0], [2.0], [4.0], [4.4]])
        pool = RegionPool("bf", ("c0",), values)
        pairs = list(itertools.combinations(range(4), 2))
        candidates = manual_candidates(pool, pairs)
        report = select_subsample(pool, candidates, BaselineMean(0))
        truth = true_mean(pool, 0)
        best = min(
            range(len(pairs)),
            key=lambda i: abs(values[list(pairs[i]), 0].mean() - truth),
        )
        assert report.winning_index == best
        assert report.winning_draw.region_indices == pairs[best]

    def test_single_candidate_wins_everything(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=10), 1, master_seed=3)
        for criterion in (
            BaselineMean(0),
            ChebyshevRelative((0, 1, 2)),
            CorrelationMax((0, 1, 2)),
        ):
            report = select_subsample(default_pool, candidates, criterion)
            assert report.winning_index == 0
            assert len(report.training_errors) == len(report.training_configs)
            assert len(report.test_errors) == len(report.test_configs)

    def test_winner_is_exact_minimum(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=30), 200, master_seed=4)
        report = select_subsample(default_pool, candidates, BaselineMean(0))
        # exhaustive re-scan along the library's own scoring path
        truth = true_mean(default_pool, 0)
        rescanned = np.abs(candidate_config_means(default_pool, candidates)[:, 0] - truth) / truth
        assert report.criterion_value == rescanned.min()
        assert np.all(rescanned >= report.criterion_value)
        # independent per-draw recomputation agrees up to float ordering
        errors = [
            abs(default_pool.values[list(d.region_indices), 0].mean() - truth) / truth
            for d in candidates.draws
        ]
        assert report.winning_index == int(np.argmin(errors))
        assert report.criterion_value == pytest.approx(min(errors), rel=1e-9)

    def test_chebyshev_rescan(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=30), 150, master_seed=5)
        report = select_subsample(default_pool, candidates, ChebyshevRelative((0, 3, 6)))
        means = candidate_config_means(default_pool, candidates)
        truth = np.asarray(pool_summary(default_pool).means)
        cheb = (np.abs(means - truth) / truth)[:, [0, 3, 6]].max(axis=1)
        assert report.criterion_value == cheb.min()
        assert np.all(cheb >= report.criterion_value)

    def test_correlation_rescan(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=30), 150, master_seed=6)
        train = (0, 2, 4, 6)
        report = select_subsample(default_pool, candidates, CorrelationMax(train))
        truth = np.asarray(pool_summary(default_pool).means)[list(train)]
        best_corr = max(
            np.corrcoef(
                candidate_config_means(default_pool, candidates)[i, list(train)], truth
            )[0, 1]
            for i in range(150)
        )
        assert report.criterion_value == pytest.approx(best_corr, rel=1e-12)

    def test_chebyshev_single_config_equals_baseline(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=30), 300, master_seed=7)
        baseline = select_subsample(default_pool, candidates, BaselineMean(2))
        chebyshev = select_subsample(default_pool, candidates, ChebyshevRelative((2,)))
        assert baseline.winning_index == chebyshev.winning_index
        assert baseline.criterion_value == chebyshev.criterion_value

    def test_growth_monotonicity(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=30), 120, master_seed=8)
        best = np.inf
        for t in (1, 5, 30, 120):
            subset = CandidateSet(
                scheme=candidates.scheme, trials=t,
                draws=candidates.draws[:t], master_seed=8,
            )
            value = select_subsample(default_pool, subset, BaselineMean(0)).criterion_value
            assert value <= best + 1e-15
            best = min(best, value)

    def test_tie_breaks_to_lowest_index(self, pool_six):
        draw = draw_srs(pool_six, SrsSpec(n=2, seed=9))
        candidates = CandidateSet(
            scheme=SrsSpec(n=2), trials=3, draws=(draw, draw, draw), master_seed=0
        )
        report = select_subsample(pool_six, candidates, BaselineMean(0))
        assert report.winning_index == 0

    def test_empty_criterion_configs_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            ChebyshevRelative(())
        with pytest.raises(ValueError, match="at least two"):
            CorrelationMax((0,))
        with pytest.raises(ValueError, match="distinct"):
            ChebyshevRelative((1, 1))

    def test_correlation_zero_variance_truth_rejected(self):
        pool = RegionPool("z", ("a", "b"), np.full((6, 2), 2.0))
        candidates = manual_candidates(pool, [(0, 1), (2, 3)])
        with pytest.raises(ValueError, match="zero.*variance|zero-variance"):
            select_subsample(pool, candidates, CorrelationMax((0, 1)))

    def test_correlation_zero_variance_candidate_rejected(self):
        # candidate (0, 1) has a flat mean vector; the truth vector does not
        values = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 3.0], [3.0, 2.0]])
        pool = RegionPool("z", ("a", "b"), values)
        candidates = manual_candidates(pool, [(0, 1)])
        with pytest.raises(ValueError, match="candidate 0"):
            select_subsample(pool, candidates, CorrelationMax((0, 1)))

    def test_report_serializes(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=5), 10, master_seed=10)
        report = select_subsample(default_pool, candidates, ChebyshevRelative((0, 1)))
        doc = report.to_dict()
        assert doc["region_indices"] == list(report.winning_draw.region_indices)
        assert doc["training_configs"] == [0, 1]
        assert doc["test_configs"] == [2, 3, 4, 5, 6]


class TestEvaluateGeneralization:
    def test_zero_variance_config_has_zero_error(self):
        values = np.column_stack([np.linspace(1.0, 2.0, 8), np.full(8, 3.0)])
        pool = RegionPool("z", ("varied", "flat"), values)
        candidates = manual_candidates(pool, [(0, 7), (3, 4)])
        report = select_subsample(pool, candidates, BaselineMean(0))
        errors = evaluate_generalization(pool, report, (1,))
        assert errors[1] == 0.0

    def test_full_coupling_transfers_error_exactly(self):
        # with full coupling and sigma = a*mu the per-region CPI is an
        # affine image across configs, so relative errors must coincide
        spec = SyntheticSpec(
            (1.0, 1.7), 0.2, 0.0, (1.0, 1.0), 500, floor_fraction=0.01
        )
        pool = generate_synthetic(spec, 33)
        # floor must never bind or the affine relation breaks
        assert pool.values[:, 0].min() > 0.01 * 1.0
        assert pool.values[:, 1].min() > 0.01 * 1.7
        candidates = generate_candidates(pool, SrsSpec(n=20), 50, master_seed=12)
        report = select_subsample(pool, candidates, BaselineMean(0))
        errors = evaluate_generalization(pool, report, (0, 1))
        assert errors[0] == pytest.approx(errors[1], abs=1e-6)

    def test_invalid_config_rejected(self, default_pool):
        candidates = generate_candidates(default_pool, SrsSpec(n=5), 5, master_seed=13)
        report = select_subsample(default_pool, candidates, BaselineMean(0))
        with pytest.raises(ValueError, match="out of range"):
            evaluate_generalization(default_pool, report, (99,))

    def test_winner_beats_single_draw_luck(self, default_pool):
        # the selected subsample's worst held-out error should sit inside
        # the typical spread of one SRS draw for that config
        candidates = generate_candidates(default_pool, SrsSpec(n=30), 1000, master_seed=14)
        report = select_subsample(default_pool, candidates, BaselineMean(0))
        worst = int(np.argmax(report.test_errors))
        worst_config = report.test_configs[worst]
        ci = empirical_ci(
            default_pool, SrsSpec(n=30), worst_config, trials=1000, master_seed=15
        )
        assert report.test_errors[worst] <= ci.relative_half_width
