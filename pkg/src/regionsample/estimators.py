"""Point estimates, analytical and empirical confidence intervals.

The analytical interval is the classical z-interval: mean +/- z * s / sqrt(n)
with s the sample std (divisor n-1).  The z quantile is used rather than
Student-t to match the convention of region-sampling studies; an optional
t-mode exists for callers who want it.

Empirical intervals come from repeated independent draws: the equal-tailed
central percentile interval of the sampled means, with linear interpolation
between order statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .population import RegionPool, true_mean
from .rng import TAG_TRIAL, derive_seed
from .samplers import SampleDraw, SchemeSpec, check_feasible, draw_scheme, with_seed

# Coefficients of Acklam's rational approximation to the standard normal
# quantile (relative error < 1.15e-9, comfortably beyond the 1e-6 needed
# here).  Central region: ppf(p) ~ q * P5(r) / Q5(r) with q = p - 1/2,
# r = q^2; tails: polynomial ratio in sqrt(-2 ln p).
_A = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_B = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
    3.754408661907416e+00,
)
_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Standard normal quantile (inverse CDF) via Acklam's approximation."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile probability must lie in (0, 1), got {p}")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (
        (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    ) / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def z_for_level(level: float) -> float:
    """Two-sided critical value z_{alpha/2} for a confidence level in (0,1)."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    return normal_quantile(0.5 + level / 2.0)


@dataclass(frozen=True)
class Estimate:
    """Sampled mean with analytical margin of error for one config.

    ``std``, ``half_width`` and ``relative_me`` are None for n == 1, where
    the sample std is undefined and no interval can be formed.
    """

    config: int
    n: int
    mean: float
    std: float | None
    level: float
    half_width: float | None
    relative_me: float | None

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "n": self.n,
            "mean": self.mean,
            "std": self.std,
            "level": self.level,
            "half_width": self.half_width,
            "relative_me": self.relative_me,
        }


@dataclass(frozen=True)
class EmpiricalCI:
    """Central percentile interval of sampled means over repeated trials."""

    scheme: str
    config: int
    trials: int
    level: float
    center: float
    half_width: float
    relative_half_width: float
    master_seed: int

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "config": self.config,
            "trials": self.trials,
            "level": self.level,
            "center": self.center,
            "half_width": self.half_width,
            "relative_half_width": self.relative_half_width,
            "master_seed": self.master_seed,
        }


def point_estimate(
    pool: RegionPool,
    draw: SampleDraw,
    config: int,
    level: float = 0.95,
    use_t: bool = False,
) -> Estimate:
    """Sampled mean and margin of error z * s / sqrt(n) for one config.

    ``use_t`` swaps the z critical value for Student-t with n-1 degrees of
    freedom; it is off by default.
    """
    pool.check_config(config)
    indices = list(draw.region_indices)
    if not indices:
        raise ValueError("draw selects no regions")
    if max(indices) >= pool.region_count:
        raise ValueError(
            f"draw index {max(indices)} out of range for pool with "
            f"{pool.region_count} regions"
        )
    sample = pool.values[indices, config]
    n = len(indices)
    mean = float(sample.mean())
    if n == 1:
        return Estimate(
            config=config, n=1, mean=mean, std=None, level=level,
            half_width=None, relative_me=None,
        )
    std = float(sample.std(ddof=1))
    if use_t:
        from scipy.stats import t as student_t

        crit = float(student_t.ppf(0.5 + level / 2.0, n - 1))
    else:
        crit = z_for_level(level)
    half_width = crit * std / math.sqrt(n)
    return Estimate(
        config=config,
        n=n,
        mean=mean,
        std=std,
        level=level,
        half_width=half_width,
        relative_me=half_width / mean,
    )


def sampled_means(
    pool: RegionPool,
    scheme: SchemeSpec,
    config: int,
    trials: int,
    master_seed: int,
) -> np.ndarray:
    """Means of ``trials`` independent draws of the scheme, in trial order.

    Trial t replaces the scheme seed with derive_seed(master_seed,
    "empirical-trial", t), so the sequence is reproducible and independent
    of evaluation order.
    """
    pool.check_config(config)
    check_feasible(pool, scheme)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    column = pool.values[:, config]
    means = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        spec = with_seed(scheme, derive_seed(master_seed, TAG_TRIAL, t))
        draw = draw_scheme(pool, spec)
        means[t] = column[list(draw.region_indices)].mean()
    return means


def empirical_ci(
    pool: RegionPool,
    scheme: SchemeSpec,
    config: int,
    trials: int = 1000,
    level: float = 0.95,
    master_seed: int = 0,
) -> EmpiricalCI:
    """Equal-tailed central percentile interval of sampled means.

    The interval is [p_{alpha/2}, p_{1-alpha/2}] of the trial means with
    linear-interpolation percentiles; the relative half-width is normalized
    by the pool's true mean for the config, not the per-trial means.
    """
    if trials < 100:
        raise ValueError(
            f"empirical CI needs at least 100 trials for meaningful "
            f"percentiles, got {trials}"
        )
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    means = np.sort(sampled_means(pool, scheme, config, trials, master_seed))
    alpha = 1.0 - level
    lo, mid, hi = np.percentile(
        means, [100.0 * alpha / 2.0, 50.0, 100.0 * (1.0 - alpha / 2.0)]
    )
    half_width = float(hi - lo) / 2.0
    return EmpiricalCI(
        scheme=scheme.describe(),
        config=config,
        trials=trials,
        level=level,
        center=float(mid),
        half_width=half_width,
        relative_half_width=half_width / true_mean(pool, config),
        master_seed=master_seed,
    )


def relative_error(estimated_mean: float, true_mean_value: float) -> float:
    """|estimate - truth| / truth; truth must be positive."""
    if true_mean_value <= 0.0:
        raise ValueError(f"true mean must be positive, got {true_mean_value}")
    return abs(estimated_mean - true_mean_value) / true_mean_value


def required_sample_size(
    rel_std: float, target_relative_me: float, level: float = 0.95
) -> int:
    """Smallest n whose z-interval relative margin stays under the target.

    Inverts the margin-of-error formula: n = ceil((z * (s/mean) / target)^2).
    Rounded up, so the returned n is conservative.
    """
    if rel_std < 0.0:
        raise ValueError("relative std must be non-negative")
    if target_relative_me <= 0.0:
        raise ValueError("target relative margin of error must be positive")
    z = z_for_level(level)
    return int(math.ceil((z * rel_std / target_relative_me) ** 2))
