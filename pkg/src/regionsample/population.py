"""Region pools: the population of per-region CPI measurements being sampled.

A pool holds one row per simulation region and one column per simulator
configuration.  Values are CPI (cycles per instruction); with a uniform
instruction count per region the arithmetic mean over a CPI column is the
whole-application CPI, which is why the uniform count is enforced rather
than supported as a weight.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .rng import TAG_SYNTHETIC, derive_seed, generator

DEFAULT_INSTRUCTIONS_PER_REGION = 1_000_000


class PoolFormatError(ValueError):
    """Raised when a pool CSV is malformed; the message names the location."""


@dataclass(frozen=True, eq=False)
class RegionPool:
    """Immutable R x C matrix of per-region CPI values across configurations."""

    app_label: str
    config_labels: tuple[str, ...]
    values: np.ndarray
    instructions_per_region: int = DEFAULT_INSTRUCTIONS_PER_REGION

    def __post_init__(self) -> None:
        labels = tuple(str(c) for c in self.config_labels)
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError(f"values must be a 2-D matrix, got {vals.ndim} dims")
        r, c = vals.shape
        if r < 1 or c < 1:
            raise ValueError(f"pool needs at least one region and one config, got shape {vals.shape}")
        if len(labels) != c:
            raise ValueError(f"{len(labels)} config labels for {c} value columns")
        if not np.all(np.isfinite(vals)):
            raise ValueError("pool values must all be finite")
        if not np.all(vals > 0.0):
            raise ValueError("pool values must all be strictly positive")
        if self.instructions_per_region < 1:
            raise ValueError("instructions_per_region must be a positive integer")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "config_labels", labels)

    @property
    def region_count(self) -> int:
        return self.values.shape[0]

    @property
    def config_count(self) -> int:
        return self.values.shape[1]

    def check_config(self, config: int) -> int:
        if not 0 <= config < self.config_count:
            raise ValueError(
                f"config index {config} out of range for pool with {self.config_count} configs"
            )
        return config


@dataclass(frozen=True)
class PopulationSummary:
    """Ground-truth per-config mean and sample std (divisor R-1) of a pool.

    ``stds`` is None for a single-region pool, where the sample std is
    undefined; the means are still reported.
    """

    app_label: str
    config_labels: tuple[str, ...]
    region_count: int
    means: tuple[float, ...]
    stds: tuple[float, ...] | None

    def to_dict(self) -> dict:
        return {
            "app_label": self.app_label,
            "config_labels": list(self.config_labels),
            "region_count": self.region_count,
            "means": list(self.means),
            "stds": None if self.stds is None else list(self.stds),
        }


@dataclass(frozen=True)
class SyntheticSpec:
    """Generative model for synthetic pools.

    Per-config std follows the linear model sigma_c = std_slope * mu_c +
    std_intercept.  Region values share a per-region latent factor: config c
    receives coupling[c] of it, the rest is independent noise, and values are
    floored at floor_fraction * mu_c to keep CPI positive.
    """

    config_means: tuple[float, ...]
    std_slope: float
    std_intercept: float
    coupling: tuple[float, ...]
    region_count: int
    floor_fraction: float = 0.05
    app_label: str = "synthetic"
    config_labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        means = tuple(float(m) for m in self.config_means)
        if not means:
            raise ValueError("config_means must be non-empty")
        if any(m <= 0 for m in means):
            raise ValueError("config means must be strictly positive CPI")
        coupling = self.coupling
        if isinstance(coupling, (int, float)):
            coupling = (float(coupling),) * len(means)
        coupling = tuple(float(r) for r in coupling)
        if len(coupling) != len(means):
            raise ValueError(
                f"{len(coupling)} coupling values for {len(means)} configs"
            )
        if any(not 0.0 <= r <= 1.0 for r in coupling):
            raise ValueError("coupling values must lie in [0, 1]")
        sigmas = [self.std_slope * m + self.std_intercept for m in means]
        if any(s < 0 for s in sigmas):
            raise ValueError("std model must be non-negative for every config mean")
        if self.region_count < 2:
            raise ValueError("region_count must be at least 2")
        if not 0.0 < self.floor_fraction < 1.0:
            raise ValueError("floor_fraction must lie in (0, 1)")
        labels = tuple(self.config_labels) or tuple(
            f"config{i}" for i in range(len(means))
        )
        if len(labels) != len(means):
            raise ValueError(f"{len(labels)} config labels for {len(means)} configs")
        object.__setattr__(self, "config_means", means)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "config_labels", labels)

    def sigmas(self) -> np.ndarray:
        mu = np.asarray(self.config_means)
        return self.std_slope * mu + self.std_intercept

    def to_dict(self) -> dict:
        return {
            "config_means": list(self.config_means),
            "std_slope": self.std_slope,
            "std_intercept": self.std_intercept,
            "coupling": list(self.coupling),
            "region_count": self.region_count,
            "floor_fraction": self.floor_fraction,
            "app_label": self.app_label,
            "config_labels": list(self.config_labels),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticSpec":
        known = {
            "config_means",
            "std_slope",
            "std_intercept",
            "coupling",
            "region_count",
            "floor_fraction",
            "app_label",
            "config_labels",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown synthetic spec fields: {sorted(unknown)}")
        required = {"config_means", "std_slope", "std_intercept", "coupling", "region_count"}
        missing = required - set(data)
        if missing:
            raise ValueError(f"synthetic spec missing fields: {sorted(missing)}")
        kwargs = dict(data)
        kwargs["config_means"] = tuple(kwargs["config_means"])
        coupling = kwargs["coupling"]
        if isinstance(coupling, (int, float)):
            coupling = (float(coupling),) * len(kwargs["config_means"])
        kwargs["coupling"] = tuple(coupling)
        if "config_labels" in kwargs:
            kwargs["config_labels"] = tuple(kwargs["config_labels"])
        return cls(**kwargs)


def _open_source(source: str | Path | IO[str]) -> tuple[IO[str], bool]:
    if hasattr(source, "read"):
        return source, False  # type: ignore[return-value]
    return open(source, "r", encoding="utf-8", newline=""), True


def load_pool(
    source: str | Path | IO[str],
    format: str = "csv",
    app_label: str | None = None,
    instructions_per_region: int = DEFAULT_INSTRUCTIONS_PER_REGION,
) -> RegionPool:
    """Read a region pool from CSV.

    Expected layout: header ``region_id,<config_0>,...``, then one row per
    region with decimal floating-point cells.  Row order defines the region
    index.  Malformed input raises :class:`PoolFormatError` naming the
    offending row and column.
    """
    if format != "csv":
        raise ValueError(f"unsupported pool format: {format!r}")
    stream, owned = _open_source(source)
    try:
        if app_label is None:
            name = getattr(stream, "name", None)
            app_label = Path(name).stem if isinstance(name, str) else "pool"
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise PoolFormatError("empty file: expected a header row") from None
        if len(header) < 2 or header[0].strip() != "region_id":
            raise PoolFormatError(
                "malformed header: expected 'region_id,<config_0>,...', got "
                f"{','.join(header) if header else '<empty>'!r}"
            )
        labels = tuple(h.strip() for h in header[1:])
        rows: list[list[float]] = []
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue  # allow a trailing blank line
            if len(row) != len(labels) + 1:
                raise PoolFormatError(
                    f"row {row_num}: ragged row with {len(row)} cells, "
                    f"expected {len(labels) + 1}"
                )
            parsed = []
            for col, (label, cell) in enumerate(zip(labels, row[1:]), start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise PoolFormatError(
                        f"row {row_num}, column {label!r}: non-numeric cell {cell!r}"
                    ) from None
                if not math.isfinite(value) or value <= 0.0:
                    raise PoolFormatError(
                        f"row {row_num}, column {label!r}: CPI must be finite "
                        f"and positive, got {cell}"
                    )
                parsed.append(value)
            rows.append(parsed)
        if not rows:
            raise PoolFormatError("no data rows: pool needs at least one region")
        return RegionPool(
            app_label=app_label,
            config_labels=labels,
            values=np.array(rows, dtype=np.float64),
            instructions_per_region=instructions_per_region,
        )
    finally:
        if owned:
            stream.close()


def save_pool(pool: RegionPool, dest: str | Path | IO[str]) -> None:
    """Write a pool as CSV, symmetric with :func:`load_pool`.

    Floats are serialized with ``repr`` (shortest round-trip form), so a
    load of the written file reproduces the values bit-exactly.
    """
    text = pool_to_csv_text(pool)
    if hasattr(dest, "write"):
        dest.write(text)  # type: ignore[union-attr]
    else:
        Path(dest).write_text(text, encoding="utf-8")


def pool_to_csv_text(pool: RegionPool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["region_id", *pool.config_labels])
    for i, row in enumerate(pool.values):
        writer.writerow([f"r{i}", *[repr(float(v)) for v in row]])
    return buf.getvalue()


def pool_summary(pool: RegionPool) -> PopulationSummary:
    """Per-config ground-truth mean and sample std (divisor R-1).

    Reduces column by column so that each mean is bit-identical to
    :func:`true_mean` of that config.
    """
    columns = [pool.values[:, c] for c in range(pool.config_count)]
    means = tuple(float(col.mean()) for col in columns)
    if pool.region_count >= 2:
        stds = tuple(float(col.std(ddof=1)) for col in columns)
    else:
        stds = None
    return PopulationSummary(
        app_label=pool.app_label,
        config_labels=pool.config_labels,
        region_count=pool.region_count,
        means=means,
        stds=stds,
    )


def true_mean(pool: RegionPool, config: int) -> float:
    """Arithmetic mean of one config column over the full pool."""
    pool.check_config(config)
    return float(pool.values[:, config].mean())


def generate_synthetic(spec: SyntheticSpec, seed: int) -> RegionPool:
    """Generate a pool from the latent-factor model; pure in (spec, seed).

    Each region i draws a shared standard-normal latent z_i, each (region,
    config) cell an independent standard-normal eps.  The cell value is

        max(floor_fraction * mu_c,
            mu_c + sigma_c * (rho_c * z_i + sqrt(1 - rho_c^2) * eps))

    z is drawn first, then eps row-major, from a PCG64 stream seeded via
    the package seed-derivation function.
    """
    rng = generator(derive_seed(seed, TAG_SYNTHETIC))
    mu = np.asarray(spec.config_means)
    sigma = spec.sigmas()
    rho = np.asarray(spec.coupling)
    z = rng.standard_normal(spec.region_count)
    eps = rng.standard_normal((spec.region_count, len(mu)))
    mixed = rho * z[:, None] + np.sqrt(1.0 - rho**2) * eps
    values = np.maximum(spec.floor_fraction * mu, mu + sigma * mixed)
    return RegionPool(
        app_label=spec.app_label,
        config_labels=spec.config_labels,
        values=values,
    )
