"""Region selection schemes: simple random sampling and ranked set sampling.

Ranked set sampling (RSS) draws cycles x set_size sets of set_size units
each, orders every set by a cheap auxiliary variable (here: the CPI column
of a chosen ranking config), and takes the j-th order statistic from the
j-th set of each cycle.  The final sample has cycles * set_size units and
its mean stays unbiased no matter how bad the ranking is; good ranking
buys variance reduction.

All draws are without replacement, and RSS keeps the full cycles *
set_size^2 unit pool distinct across sets, so no region is simulated twice.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .population import RegionPool
from .rng import TAG_RSS, TAG_SRS, derive_seed, generator


@dataclass(frozen=True)
class SrsSpec:
    """Simple random sample of n regions, without replacement."""

    n: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("sample size n must be at least 1")

    @property
    def sample_size(self) -> int:
        return self.n

    def describe(self) -> str:
        return f"srs(n={self.n})"


@dataclass(frozen=True)
class RssSpec:
    """Ranked set sample: cycles * set_size sets, set_size units per set.

    The sample size is cycles * set_size; forming it consumes
    cycles * set_size**2 distinct regions.  ``ranking_config`` is the pool
    column used to order units within each set.
    """

    cycles: int
    set_size: int
    ranking_config: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.cycles < 1:
            raise ValueError("cycles must be at least 1")
        if self.set_size < 1:
            raise ValueError("set_size must be at least 1")
        if self.ranking_config < 0:
            raise ValueError("ranking_config must be a valid config index")

    @property
    def sample_size(self) -> int:
        return self.cycles * self.set_size

    @property
    def units_drawn(self) -> int:
        return self.cycles * self.set_size**2

    def describe(self) -> str:
        return (
            f"rss(m={self.cycles},k={self.set_size},rank={self.ranking_config})"
        )


SchemeSpec = SrsSpec | RssSpec


@dataclass(frozen=True)
class SampleDraw:
    """One region selection, with the scheme metadata that produced it.

    For RSS draws, ``sets`` retains the full set composition and
    ``selected_ranks`` the order-statistic position taken from each set
    (set m*K+j contributes its rank-j unit, 0-based ascending).
    """

    scheme: str
    spec: SchemeSpec
    region_indices: tuple[int, ...]
    sets: tuple[tuple[int, ...], ...] | None = None
    selected_ranks: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.scheme not in ("srs", "rss"):
            raise ValueError(f"unknown scheme tag {self.scheme!r}")
        if len(set(self.region_indices)) != len(self.region_indices):
            raise ValueError("region indices must be distinct")
        if self.scheme == "rss":
            if self.sets is None or self.selected_ranks is None:
                raise ValueError("rss draws must retain sets and selected ranks")
            if len(self.sets) != len(self.region_indices):
                raise ValueError("one selected region per set required")

    @property
    def sample_size(self) -> int:
        return len(self.region_indices)

    def to_dict(self) -> dict:
        doc: dict = {
            "scheme": self.scheme,
            "region_indices": list(self.region_indices),
        }
        if isinstance(self.spec, SrsSpec):
            doc["spec"] = {"n": self.spec.n, "seed": self.spec.seed}
        else:
            doc["spec"] = {
                "cycles": self.spec.cycles,
                "set_size": self.spec.set_size,
                "ranking_config": self.spec.ranking_config,
                "seed": self.spec.seed,
            }
        if self.scheme == "rss":
            doc["sets"] = [list(s) for s in self.sets or ()]
            doc["selected_ranks"] = list(self.selected_ranks or ())
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SampleDraw":
        scheme = doc["scheme"]
        if scheme == "srs":
            spec: SchemeSpec = SrsSpec(**doc["spec"])
            return cls(
                scheme="srs",
                spec=spec,
                region_indices=tuple(doc["region_indices"]),
            )
        spec = RssSpec(**doc["spec"])
        return cls(
            scheme="rss",
            spec=spec,
            region_indices=tuple(doc["region_indices"]),
            sets=tuple(tuple(s) for s in doc["sets"]),
            selected_ranks=tuple(doc["selected_ranks"]),
        )


def check_feasible(pool: RegionPool, spec: SchemeSpec) -> None:
    """Raise ValueError when the scheme cannot be drawn from the pool."""
    r = pool.region_count
    if isinstance(spec, SrsSpec):
        if spec.n > r:
            raise ValueError(
                f"sample size n={spec.n} exceeds pool region count R={r}"
            )
        return
    pool.check_config(spec.ranking_config)
    if spec.units_drawn > r:
        max_k = int(np.floor(np.sqrt(r / spec.cycles)))
        raise ValueError(
            f"rss needs cycles*set_size^2 = {spec.units_drawn} distinct regions "
            f"but the pool has only {r}; maximum feasible set_size for "
            f"cycles={spec.cycles} is {max_k}"
        )


def draw_srs(pool: RegionPool, spec: SrsSpec) -> SampleDraw:
    """Draw n distinct region indices uniformly without replacement.

    Deterministic given (pool region count, spec); the stream is seeded by
    derive_seed(spec.seed, "srs-draw").
    """
    check_feasible(pool, spec)
    rng = generator(derive_seed(spec.seed, TAG_SRS))
    indices = rng.choice(pool.region_count, size=spec.n, replace=False)
    return SampleDraw(
        scheme="srs",
        spec=spec,
        region_indices=tuple(int(i) for i in indices),
    )


def form_rss_sets(pool: RegionPool, spec: RssSpec) -> tuple[tuple[int, ...], ...]:
    """Randomly select cycles*set_size sets of set_size distinct regions.

    All cycles*set_size^2 indices are distinct globally (drawn without
    replacement), then split into consecutive sets.  Deterministic given
    (pool region count, spec).
    """
    check_feasible(pool, spec)
    rng = generator(derive_seed(spec.seed, TAG_RSS))
    units = rng.choice(pool.region_count, size=spec.units_drawn, replace=False)
    k = spec.set_size
    return tuple(
        tuple(int(i) for i in units[s * k : (s + 1) * k])
        for s in range(spec.cycles * k)
    )


def rss_select(
    sets: Sequence[Sequence[int]],
    ranking_values: np.ndarray,
    spec: RssSpec,
) -> SampleDraw:
    """Pick one unit per set by order statistic; pure, no randomness.

    Within cycle m, the set at position j contributes its j-th smallest
    unit (0-based) under ``ranking_values``; ties break by smaller region
    index so the result is independent of input order.
    """
    k = spec.set_size
    if len(sets) != spec.cycles * k:
        raise ValueError(
            f"expected {spec.cycles * k} sets, got {len(sets)}"
        )
    ranking_values = np.asarray(ranking_values, dtype=np.float64)
    selected: list[int] = []
    ranks: list[int] = []
    for s, members in enumerate(sets):
        if len(members) != k:
            raise ValueError(f"set {s} has {len(members)} units, expected {k}")
        vals = ranking_values[list(members)]
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"set {s} has non-finite ranking values")
        rank = s % k
        ordered = sorted(members, key=lambda i: (ranking_values[i], i))
        selected.append(int(ordered[rank]))
        ranks.append(rank)
    return SampleDraw(
        scheme="rss",
        spec=spec,
        region_indices=tuple(selected),
        sets=tuple(tuple(int(i) for i in s) for s in sets),
        selected_ranks=tuple(ranks),
    )


def draw_rss(pool: RegionPool, spec: RssSpec) -> SampleDraw:
    """Form RSS sets and select by rank, using the ranking config's CPI."""
    sets = form_rss_sets(pool, spec)
    return rss_select(sets, pool.values[:, spec.ranking_config], spec)


def ranking_accuracy(
    draw: SampleDraw, pool: RegionPool, eval_config: int
) -> list[tuple[int, int]]:
    """True rank of each selected unit within its set under another config.

    Returns one (set position j, true rank) pair per set; perfect ranking
    transfer shows up as true rank == j everywhere, which holds exactly
    when eval_config is the draw's own ranking config.
    """
    if draw.scheme != "rss" or draw.sets is None:
        raise ValueError("ranking accuracy requires an rss draw with retained sets")
    pool.check_config(eval_config)
    values = pool.values[:, eval_config]
    k = draw.spec.set_size  # type: ignore[union-attr]
    out: list[tuple[int, int]] = []
    for s, members in enumerate(draw.sets):
        chosen = draw.region_indices[s]
        ordered = sorted(members, key=lambda i: (values[i], i))
        out.append((s % k, ordered.index(chosen)))
    return out


def draw_scheme(pool: RegionPool, spec: SchemeSpec) -> SampleDraw:
    """Dispatch on the scheme spec type."""
    if isinstance(spec, SrsSpec):
        return draw_srs(pool, spec)
    return draw_rss(pool, spec)


def with_seed(spec: SchemeSpec, seed: int) -> SchemeSpec:
    """Copy of a scheme spec with its draw seed replaced (trial templating)."""
    return replace(spec, seed=seed)
