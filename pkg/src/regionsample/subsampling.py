"""Repeated subsampling: draw many candidate subsamples, keep the best one.

The pool's full-population means serve as the accurate reference.  Many
fixed-size subsamples are drawn (SRS or RSS), each is scored against the
reference on one or more training configs, and the winner is reported along
with its held-out errors on the remaining (test) configs.  The winning
subsample's region indices are the deliverable: the regions future studies
should simulate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .population import RegionPool, pool_summary
from .rng import TAG_CANDIDATE, derive_seed
from .samplers import SampleDraw, SchemeSpec, check_feasible, draw_scheme, with_seed


@dataclass(frozen=True)
class BaselineMean:
    """Minimize the relative error of the subsample mean on one config."""

    baseline_config: int = 0

    def describe(self) -> str:
        return f"baseline-mean(config={self.baseline_config})"


@dataclass(frozen=True)
class ChebyshevRelative:
    """Minimize the worst relative error across the training configs."""

    training_configs: tuple[int, ...]

    def __post_init__(self) -> None:
        configs = tuple(int(c) for c in self.training_configs)
        if not configs:
            raise ValueError("chebyshev criterion needs at least one training config")
        if len(set(configs)) != len(configs):
            raise ValueError("training configs must be distinct")
        object.__setattr__(self, "training_configs", configs)

    def describe(self) -> str:
        return f"chebyshev-relative(train={list(self.training_configs)})"


@dataclass(frozen=True)
class CorrelationMax:
    """Maximize Pearson correlation between subsample and true mean vectors."""

    training_configs: tuple[int, ...]

    def __post_init__(self) -> None:
        configs = tuple(int(c) for c in self.training_configs)
        if len(configs) < 2:
            raise ValueError("correlation criterion needs at least two training configs")
        if len(set(configs)) != len(configs):
            raise ValueError("training configs must be distinct")
        object.__setattr__(self, "training_configs", configs)

    def describe(self) -> str:
        return f"correlation-max(train={list(self.training_configs)})"


SelectionCriterion = BaselineMean | ChebyshevRelative | CorrelationMax


@dataclass(frozen=True)
class CandidateSet:
    """T candidate draws from one scheme template, all the same sample size."""

    scheme: SchemeSpec
    trials: int
    draws: tuple[SampleDraw, ...]
    master_seed: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("candidate set needs at least one trial")
        if len(self.draws) != self.trials:
            raise ValueError(
                f"{len(self.draws)} draws for trials={self.trials}"
            )
        sizes = {d.sample_size for d in self.draws}
        if len(sizes) > 1:
            raise ValueError(f"all draws must share one sample size, got {sorted(sizes)}")


@dataclass(frozen=True)
class SubsampleReport:
    """The winning subsample with its training and held-out errors."""

    criterion: str
    criterion_value: float
    winning_index: int
    winning_draw: SampleDraw
    training_configs: tuple[int, ...]
    test_configs: tuple[int, ...]
    training_errors: tuple[float, ...]
    test_errors: tuple[float, ...]

    @property
    def max_training_error(self) -> float:
        return max(self.training_errors)

    @property
    def max_test_error(self) -> float:
        return max(self.test_errors) if self.test_errors else 0.0

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "criterion_value": self.criterion_value,
            "winning_index": self.winning_index,
            "winning_draw": self.winning_draw.to_dict(),
            "region_indices": list(self.winning_draw.region_indices),
            "training_configs": list(self.training_configs),
            "test_configs": list(self.test_configs),
            "training_errors": list(self.training_errors),
            "test_errors": list(self.test_errors),
        }


def generate_candidates(
    pool: RegionPool,
    scheme: SchemeSpec,
    trials: int,
    master_seed: int,
) -> CandidateSet:
    """Draw T deterministic candidates; trial t uses a seed derived from
    (master_seed, "candidate", t)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    check_feasible(pool, scheme)
    draws = tuple(
        draw_scheme(pool, with_seed(scheme, derive_seed(master_seed, TAG_CANDIDATE, t)))
        for t in range(trials)
    )
    return CandidateSet(scheme=scheme, trials=trials, draws=draws, master_seed=master_seed)


def candidate_config_means(pool: RegionPool, candidates: CandidateSet) -> np.ndarray:
    """(T, C) matrix of per-candidate config means."""
    idx = np.array([d.region_indices for d in candidates.draws], dtype=np.intp)
    return pool.values[idx].mean(axis=1)


def _criterion_scores(
    pool: RegionPool,
    sub_means: np.ndarray,
    criterion: SelectionCriterion,
) -> tuple[np.ndarray, bool]:
    """Per-candidate scores and whether lower is better."""
    truth = np.asarray(pool_summary(pool).means)
    rel_err = np.abs(sub_means - truth) / truth
    if isinstance(criterion, BaselineMean):
        pool.check_config(criterion.baseline_config)
        return rel_err[:, criterion.baseline_config], True
    for c in criterion.training_configs:
        pool.check_config(c)
    train = list(criterion.training_configs)
    if isinstance(criterion, ChebyshevRelative):
        return rel_err[:, train].max(axis=1), True
    # CorrelationMax: Pearson correlation of the per-config mean vectors
    # restricted to the training configs.  Degenerate (zero-variance)
    # vectors are an error, not a silent fallback: a substituted criterion
    # would corrupt experiment provenance.
    truth_vec = truth[train] - truth[train].mean()
    truth_norm = float(np.sqrt((truth_vec**2).sum()))
    if truth_norm == 0.0:
        raise ValueError(
            "correlation criterion undefined: true mean vector has zero "
            "variance across the training configs"
        )
    cand = sub_means[:, train]
    cand = cand - cand.mean(axis=1, keepdims=True)
    cand_norms = np.sqrt((cand**2).sum(axis=1))
    degenerate = np.flatnonzero(cand_norms == 0.0)
    if degenerate.size:
        raise ValueError(
            f"correlation criterion undefined: candidate {int(degenerate[0])} "
            "has a zero-variance mean vector across the training configs"
        )
    return (cand @ truth_vec) / (cand_norms * truth_norm), False


def select_subsample(
    pool: RegionPool,
    candidates: CandidateSet,
    criterion: SelectionCriterion,
) -> SubsampleReport:
    """Score every candidate and report the winner.

    Ties break toward the lowest candidate index, making selection a
    deterministic reduction independent of evaluation order.  Errors on all
    configs are reported, partitioned into training and test (= the rest).
    """
    sub_means = candidate_config_means(pool, candidates)
    scores, lower_is_better = _criterion_scores(pool, sub_means, criterion)
    winner = int(np.argmin(scores) if lower_is_better else np.argmax(scores))

    truth = np.asarray(pool_summary(pool).means)
    rel_err = np.abs(sub_means[winner] - truth) / truth
    if isinstance(criterion, BaselineMean):
        training = (criterion.baseline_config,)
    else:
        training = criterion.training_configs
    test = tuple(c for c in range(pool.config_count) if c not in training)
    return SubsampleReport(
        criterion=criterion.describe(),
        criterion_value=float(scores[winner]),
        winning_index=winner,
        winning_draw=candidates.draws[winner],
        training_configs=training,
        test_configs=test,
        training_errors=tuple(float(rel_err[c]) for c in training),
        test_errors=tuple(float(rel_err[c]) for c in test),
    )


def evaluate_generalization(
    pool: RegionPool,
    report: SubsampleReport,
    test_configs: tuple[int, ...] | list[int],
) -> dict[int, float]:
    """Relative error of the winning subsample's mean per test config."""
    indices = list(report.winning_draw.region_indices)
    if max(indices) >= pool.region_count:
        raise ValueError("winning draw indices out of range for this pool")
    out: dict[int, float] = {}
    for c in test_configs:
        pool.check_config(c)
        sub_mean = float(pool.values[indices, c].mean())
        truth = float(pool.values[:, c].mean())
        out[c] = abs(sub_mean - truth) / truth
    return out
