"""Region sampling toolkit for CPU simulation studies.

Selects small, representative sets of simulation regions from a pool of
per-region CPI measurements: simple random sampling, ranked set sampling,
and repeated subsampling with single- and multi-config selection criteria,
plus an experiment harness over synthetic stand-in populations.
"""

from ._version import __version__
from .estimators import (
    EmpiricalCI,
    Estimate,
    empirical_ci,
    normal_quantile,
    point_estimate,
    relative_error,
    required_sample_size,
    sampled_means,
    z_for_level,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    default_suite_spec,
    hetero_suite_spec,
    run_experiment,
)
from .population import (
    PoolFormatError,
    PopulationSummary,
    RegionPool,
    SyntheticSpec,
    generate_synthetic,
    load_pool,
    pool_summary,
    save_pool,
    true_mean,
)
from .rng import derive_seed
from .samplers import (
    RssSpec,
    SampleDraw,
    SrsSpec,
    draw_rss,
    draw_srs,
    form_rss_sets,
    ranking_accuracy,
    rss_select,
)
from .subsampling import (
    BaselineMean,
    CandidateSet,
    ChebyshevRelative,
    CorrelationMax,
    SubsampleReport,
    evaluate_generalization,
    generate_candidates,
    select_subsample,
)

__all__ = [
    "__version__",
    "BaselineMean",
    "CandidateSet",
    "ChebyshevRelative",
    "CorrelationMax",
    "EmpiricalCI",
    "Estimate",
    "ExperimentConfig",
    "ExperimentResult",
    "PoolFormatError",
    "PopulationSummary",
    "RegionPool",
    "RssSpec",
    "SampleDraw",
    "SrsSpec",
    "SubsampleReport",
    "SyntheticSpec",
    "default_suite_spec",
    "derive_seed",
    "draw_rss",
    "draw_srs",
    "empirical_ci",
    "evaluate_generalization",
    "form_rss_sets",
    "generate_candidates",
    "generate_synthetic",
    "hetero_suite_spec",
    "load_pool",
    "normal_quantile",
    "point_estimate",
    "pool_summary",
    "ranking_accuracy",
    "relative_error",
    "required_sample_size",
    "rss_select",
    "run_experiment",
    "sampled_means",
    "save_pool",
    "select_subsample",
    "true_mean",
    "z_for_level",
]
