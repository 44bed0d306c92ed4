import numpy as np
import pytest

from regionsample import (
    RegionPool,
    SyntheticSpec,
    default_suite_spec,
    generate_synthetic,
    hetero_suite_spec,
)

# Fixed seeds so every expected value in the suite is reproducible.
SUITE_SEED = 1234
HETERO_SEED = 5678


@pytest.fixture
def tiny_pool() -> RegionPool:
    return RegionPool(
        app_label="tiny",
        config_labels=("base", "new"),
        values=np.array([[1.0, 2.0], [3.0, 4.0]]),
    )


@pytest.fixture
def pool_six() -> RegionPool:
    """Six regions, one config; small enough to enumerate all samples."""
    return RegionPool(
        app_label="six",
        config_labels=("only",),
        values=np.array([[1.0], [1.3], [2.1], [2.8], [3.5], [4.1]]),
    )


@pytest.fixture(scope="session")
def default_pool() -> RegionPool:
    return generate_synthetic(default_suite_spec(), SUITE_SEED)


@pytest.fixture(scope="session")
def hetero_pool() -> RegionPool:
    return generate_synthetic(hetero_suite_spec(), HETERO_SEED)


@pytest.fixture(scope="session")
def noise_rank_pool() -> RegionPool:
    """50 regions, config 0 fully coupled to the latent, config 1 pure noise.

    Ranking on config 1 carries no information about config 0, which is
    exactly what the noise-ranked unbiasedness checks need.
    """
    spec = SyntheticSpec(
        config_means=(1.5, 1.5),
        std_slope=0.3,
        std_intercept=0.0,
        coupling=(1.0, 0.0),
        region_count=50,
        app_label="noise-rank",
    )
    return generate_synthetic(spec, 97)
