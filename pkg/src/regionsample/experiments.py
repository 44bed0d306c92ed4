"""Scriptable experiment harness over synthetic or user-supplied pools.

Each experiment is a pure function of its :class:`ExperimentConfig`:
re-running with the same config yields byte-identical tables.  Outputs are
plotting-tool-ready CSVs plus a combined JSON report; every file carries a
provenance header (master seed, config hash, tool version) so any row can
be reproduced in isolation.

Experiment names (with their short aliases):

    std-vs-mean (fig1)            per-config ground-truth mean and std
    sampling-distribution (fig6)  trial means and histograms per scheme
    ci-comparison (fig7)          analytical vs empirical relative widths
    ranking-accuracy (fig8)       true rank of selected units per config
    error-comparison (fig10)      once vs repeated subsampling errors
    criteria-comparison (fig12)   selection criteria on held-out configs
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._version import __version__
from .estimators import empirical_ci, relative_error, sampled_means, z_for_level
from .population import (
    RegionPool,
    SyntheticSpec,
    generate_synthetic,
    load_pool,
    pool_summary,
    true_mean,
)
from .rng import derive_seed
from .samplers import RssSpec, SrsSpec, check_feasible, draw_rss, ranking_accuracy
from .subsampling import (
    BaselineMean,
    ChebyshevRelative,
    CorrelationMax,
    candidate_config_means,
    generate_candidates,
    select_subsample,
)
from .tables import Table, atomic_write_text, dump_json

EXPERIMENT_NAMES = (
    "std-vs-mean",
    "sampling-distribution",
    "ci-comparison",
    "ranking-accuracy",
    "error-comparison",
    "criteria-comparison",
)

EXPERIMENT_ALIASES = {
    "fig1": "std-vs-mean",
    "fig6": "sampling-distribution",
    "fig7": "ci-comparison",
    "fig8": "ranking-accuracy",
    "fig10": "error-comparison",
    "fig12": "criteria-comparison",
}


def default_suite_spec(region_count: int = 2000) -> SyntheticSpec:
    """Default 7-config synthetic suite.

    CPI means descend geometrically so the last config is 1.68x faster than
    the first, std is 0.3 * mean for every config, and a shared coupling of
    0.9 makes per-region rankings transfer well (not perfectly) across
    configs.  These numbers parameterize the desk-scale experiments; they
    are not measurements of any real machine.
    """
    ratio = (1.0 / 1.68) ** (1.0 / 6.0)
    means = tuple(1.68 * ratio**c for c in range(7))
    return SyntheticSpec(
        config_means=means,
        std_slope=0.3,
        std_intercept=0.0,
        coupling=(0.9,) * 7,
        region_count=region_count,
        floor_fraction=0.05,
        app_label="suite-default",
    )


def hetero_suite_spec(region_count: int = 2000) -> SyntheticSpec:
    """Heterogeneity-boosted suite: per-config coupling spread over [0.8, 1].

    Configs differ in how much of their region-level variation is shared,
    so selection on one config generalizes unevenly.  The std slope is
    lower than the default suite's (0.15 vs 0.3): with 30-region samples,
    the part of a held-out config's error that no training config can see
    scales with sigma/mu * sqrt(1 - coupling^2), and 0.15 keeps that floor
    within a few percent so criteria differences are visible rather than
    drowned.
    """
    ratio = (1.0 / 1.68) ** (1.0 / 6.0)
    means = tuple(1.68 * ratio**c for c in range(7))
    return SyntheticSpec(
        config_means=means,
        std_slope=0.15,
        std_intercept=0.0,
        coupling=(0.8, 0.9, 1.0, 0.85, 0.95, 1.0, 0.9),
        region_count=region_count,
        floor_fraction=0.05,
        app_label="suite-hetero",
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment needs; hashable to a provenance digest.

    ``pools`` holds sources: ``{"csv": path}`` for a measured pool or
    ``{"synthetic": {...}}`` for a generated one (optional ``"seed"``;
    derived from the master seed and pool position when omitted).
    """

    master_seed: int
    pools: tuple[dict, ...] = field(default_factory=tuple)
    sample_size: int = 30
    trials: int = 1000
    schemes: tuple[str, ...] = ("srs", "rss")
    rss_cycles: tuple[int, ...] = (1, 2, 3)
    ranking_config: int = 0
    eval_config: int | None = None
    train_configs: tuple[int, ...] = (0, 1, 2)
    level: float = 0.95
    histogram_bins: int = 40

    def __post_init__(self) -> None:
        if self.sample_size < 1:
            raise ValueError("sample_size must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        unknown = set(self.schemes) - {"srs", "rss"}
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        for source in self.pools:
            if not isinstance(source, dict) or not ({"csv", "synthetic"} & set(source)):
                raise ValueError(
                    "each pool source must be a dict with a 'csv' or 'synthetic' key"
                )
        object.__setattr__(self, "pools", tuple(dict(p) for p in self.pools))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "rss_cycles", tuple(self.rss_cycles))
        object.__setattr__(self, "train_configs", tuple(self.train_configs))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {
            "master_seed", "pools", "sample_size", "trials", "schemes",
            "rss_cycles", "ranking_config", "eval_config", "train_configs",
            "level", "histogram_bins",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment config fields: {sorted(unknown)}")
        if "master_seed" not in data:
            raise ValueError("experiment config must set master_seed explicitly")
        kwargs = dict(data)
        for key in ("pools", "schemes", "rss_cycles", "train_configs"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def to_canonical_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "pools": list(self.pools),
            "sample_size": self.sample_size,
            "trials": self.trials,
            "schemes": list(self.schemes),
            "rss_cycles": list(self.rss_cycles),
            "ranking_config": self.ranking_config,
            "eval_config": self.eval_config,
            "train_configs": list(self.train_configs),
            "level": self.level,
            "histogram_bins": self.histogram_bins,
        }

    def config_hash(self) -> str:
        canon = dump_json(self.to_canonical_dict(), indent=0)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def resolve_pools(cfg: ExperimentConfig) -> list[RegionPool]:
    """Load or generate every pool source; default to the standard suite."""
    sources = cfg.pools or ({"synthetic": default_suite_spec().to_dict()},)
    pools: list[RegionPool] = []
    for i, source in enumerate(sources):
        if "csv" in source:
            pools.append(load_pool(source["csv"]))
        else:
            spec = SyntheticSpec.from_dict(source["synthetic"])
            seed = source.get("seed")
            if seed is None:
                seed = derive_seed(cfg.master_seed, "pool", i)
            pools.append(generate_synthetic(spec, seed))
    return pools


def _eval_config(cfg: ExperimentConfig, pool: RegionPool) -> int:
    c = pool.config_count - 1 if cfg.eval_config is None else cfg.eval_config
    return pool.check_config(c)


def _scheme_templates(cfg: ExperimentConfig, pool: RegionPool) -> list[tuple[str, SrsSpec | RssSpec]]:
    templates: list[tuple[str, SrsSpec | RssSpec]] = []
    for name in cfg.schemes:
        if name == "srs":
            templates.append(("srs", SrsSpec(n=cfg.sample_size)))
        else:
            spec = RssSpec(
                cycles=1, set_size=cfg.sample_size, ranking_config=cfg.ranking_config
            )
            templates.append(("rss", spec))
    for _, spec in templates:
        check_feasible(pool, spec)
    return templates


def exp_std_vs_mean(pools: Sequence[RegionPool]) -> Table:
    """Ground-truth (mean, std) per pool and config; std blank for R=1."""
    table = Table(("app", "config", "config_label", "mean_cpi", "std_cpi"))
    for pool in pools:
        summary = pool_summary(pool)
        for c, label in enumerate(pool.config_labels):
            std = "" if summary.stds is None else summary.stds[c]
            table.append(pool.app_label, c, label, summary.means[c], std)
    return table


def exp_sampling_distribution(cfg: ExperimentConfig) -> dict[str, Table]:
    """Trial means per scheme plus shared-range histograms.

    RSS ranks on the ranking config while means are always evaluated on the
    eval config, mirroring the cross-config use of a cheap baseline run.
    """
    means_table = Table(("app", "scheme", "trial", "sampled_mean"))
    hist_table = Table(("app", "scheme", "bin_left", "bin_right", "count"))
    for pool in resolve_pools(cfg):
        eval_config = _eval_config(cfg, pool)
        per_scheme: list[tuple[str, np.ndarray]] = []
        for _, template in _scheme_templates(cfg, pool):
            means = sampled_means(
                pool, template, eval_config, cfg.trials, cfg.master_seed
            )
            per_scheme.append((template.describe(), means))
            for t, m in enumerate(means):
                means_table.append(pool.app_label, template.describe(), t, float(m))
        lo = min(float(m.min()) for _, m in per_scheme)
        hi = max(float(m.max()) for _, m in per_scheme)
        for label, means in per_scheme:
            counts, edges = np.histogram(means, bins=cfg.histogram_bins, range=(lo, hi))
            for b, count in enumerate(counts):
                hist_table.append(
                    pool.app_label, label, float(edges[b]), float(edges[b + 1]), int(count)
                )
    return {"means": means_table, "histogram": hist_table}


def exp_ci_comparison(cfg: ExperimentConfig) -> Table:
    """Relative CI half-widths: analytical SRS, empirical SRS, empirical RSS.

    RSS runs once per cycle count in ``rss_cycles`` with set size
    sample_size / cycles (must divide evenly), ranking on the ranking
    config, evaluated on the eval config.
    """
    table = Table(("app", "scheme", "relative_half_width"))
    n = cfg.sample_size
    z = z_for_level(cfg.level)
    for pool in resolve_pools(cfg):
        eval_config = _eval_config(cfg, pool)
        summary = pool_summary(pool)
        if summary.stds is None:
            raise ValueError("ci comparison needs a pool with at least 2 regions")
        analytical = (
            z * summary.stds[eval_config] / np.sqrt(n) / summary.means[eval_config]
        )
        table.append(pool.app_label, "srs-analytical", float(analytical))
        srs = empirical_ci(
            pool, SrsSpec(n=n), eval_config, cfg.trials, cfg.level, cfg.master_seed
        )
        table.append(pool.app_label, "srs-empirical", srs.relative_half_width)
        for m in cfg.rss_cycles:
            if n % m:
                raise ValueError(
                    f"sample size {n} is not divisible by rss cycle count {m}"
                )
            spec = RssSpec(cycles=m, set_size=n // m, ranking_config=cfg.ranking_config)
            rss = empirical_ci(
                pool, spec, eval_config, cfg.trials, cfg.level, cfg.master_seed
            )
            table.append(pool.app_label, f"rss-m{m}", rss.relative_half_width)
    return table


def exp_ranking_accuracy(cfg: ExperimentConfig) -> Table:
    """True within-set rank of each selected unit, for every eval config.

    Uses a single one-cycle RSS draw with set size = sample_size, ranked on
    the ranking config; the identity line (true_rank == set_position) means
    the ranking transfers perfectly.
    """
    table = Table(("app", "eval_config", "set_position", "true_rank"))
    for i, pool in enumerate(resolve_pools(cfg)):
        spec = RssSpec(
            cycles=1,
            set_size=cfg.sample_size,
            ranking_config=cfg.ranking_config,
            seed=derive_seed(cfg.master_seed, "ranking-accuracy", i),
        )
        check_feasible(pool, spec)
        draw = draw_rss(pool, spec)
        for c in range(pool.config_count):
            for position, rank in ranking_accuracy(draw, pool, c):
                table.append(pool.app_label, c, position, rank)
    return table


def exp_error_comparison(cfg: ExperimentConfig) -> Table:
    """Observed errors: sampling once vs repeated subsampling, per scheme.

    "Once" is candidate 0 of the candidate set and "repeated" the winner
    under the baseline-mean criterion, so the comparison is paired on the
    same randomness.  Errors are reported on every config except the
    baseline (= ranking config).
    """
    table = Table(("app", "config", "scheme", "relative_error"))
    for i, pool in enumerate(resolve_pools(cfg)):
        baseline = pool.check_config(cfg.ranking_config)
        eval_configs = [c for c in range(pool.config_count) if c != baseline]
        for name, template in _scheme_templates(cfg, pool):
            candidates = generate_candidates(
                pool, template, cfg.trials,
                derive_seed(cfg.master_seed, "error-comparison", i),
            )
            report = select_subsample(pool, candidates, BaselineMean(baseline))
            means = candidate_config_means(pool, candidates)
            once_means = means[0]
            winner_means = means[report.winning_index]
            for c in eval_configs:
                truth = true_mean(pool, c)
                table.append(
                    pool.app_label, c, f"{name}-once",
                    relative_error(float(once_means[c]), truth),
                )
                table.append(
                    pool.app_label, c, f"{name}-repeated",
                    relative_error(float(winner_means[c]), truth),
                )
    return table


def exp_criteria_comparison(cfg: ExperimentConfig) -> Table:
    """Held-out errors for each selection criterion and scheme.

    Training configs are clipped to the pool's config range; when no test
    configs remain the pool contributes no rows.  The correlation criterion
    is skipped when fewer than two training configs exist.
    """
    table = Table(("app", "test_config", "scheme", "criterion", "relative_error"))
    for i, pool in enumerate(resolve_pools(cfg)):
        train = tuple(c for c in cfg.train_configs if c < pool.config_count)
        if not train:
            raise ValueError(
                f"no training configs valid for pool {pool.app_label!r}"
            )
        test = tuple(c for c in range(pool.config_count) if c not in train)
        if not test:
            continue
        criteria: list = [BaselineMean(train[0]), ChebyshevRelative(train)]
        if len(train) >= 2:
            criteria.append(CorrelationMax(train))
        for name, template in _scheme_templates(cfg, pool):
            candidates = generate_candidates(
                pool, template, cfg.trials,
                derive_seed(cfg.master_seed, "criteria-comparison", i),
            )
            for criterion in criteria:
                report = select_subsample(pool, candidates, criterion)
                errors = dict(zip(report.test_configs, report.test_errors))
                for c in test:
                    table.append(
                        pool.app_label, c, name,
                        type(criterion).__name__, errors[c],
                    )
    return table


@dataclass(frozen=True)
class ExperimentResult:
    """Named tables plus the provenance needed to reproduce them."""

    name: str
    config: ExperimentConfig
    tables: dict[str, Table]

    def provenance_lines(self) -> list[str]:
        return [
            f"tool: regionsample {__version__}",
            f"experiment: {self.name}",
            f"master_seed: {self.config.master_seed}",
            f"config_sha256: {self.config.config_hash()}",
            "pools: synthetic stand-ins unless a csv source is listed in the config",
        ]

    def to_json_obj(self) -> dict:
        return {
            "experiment": self.name,
            "provenance": {
                "tool_version": __version__,
                "master_seed": self.config.master_seed,
                "config_sha256": self.config.config_hash(),
                "config": self.config.to_canonical_dict(),
            },
            "tables": {name: t.to_json_obj() for name, t in self.tables.items()},
        }

    def write(self, out_dir: str | Path, force: bool = False) -> list[Path]:
        out_dir = Path(out_dir)
        written: list[Path] = []
        stem = self.name.replace("-", "_")
        for table_name, table in sorted(self.tables.items()):
            path = out_dir / f"{stem}_{table_name}.csv"
            atomic_write_text(path, table.to_csv_text(self.provenance_lines()), force)
            written.append(path)
        report = out_dir / f"{stem}.json"
        atomic_write_text(report, dump_json(self.to_json_obj()), force)
        written.append(report)
        return written


def canonical_experiment_name(name: str) -> str:
    resolved = EXPERIMENT_ALIASES.get(name, name)
    if resolved not in EXPERIMENT_NAMES:
        choices = ", ".join(EXPERIMENT_NAMES + tuple(EXPERIMENT_ALIASES))
        raise ValueError(f"unknown experiment {name!r}; choose one of: {choices}")
    return resolved


def run_experiment(name: str, cfg: ExperimentConfig) -> ExperimentResult:
    """Dispatch one experiment by name (aliases accepted)."""
    resolved = canonical_experiment_name(name)
    if resolved == "std-vs-mean":
        tables = {"table": exp_std_vs_mean(resolve_pools(cfg))}
    elif resolved == "sampling-distribution":
        tables = exp_sampling_distribution(cfg)
    elif resolved == "ci-comparison":
        tables = {"table": exp_ci_comparison(cfg)}
    elif resolved == "ranking-accuracy":
        tables = {"table": exp_ranking_accuracy(cfg)}
    elif resolved == "error-comparison":
        tables = {"table": exp_error_comparison(cfg)}
    else:
        tables = {"table": exp_criteria_comparison(cfg)}
    return ExperimentResult(name=resolved, config=cfg, tables=tables)
