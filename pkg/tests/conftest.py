import numpy as np
import pytest

from radome_irs import SimConfig, build_layout, build_tensors, sample_paths


@pytest.fixture(scope="session")
def default_config():
    """The paper-scale default: 4x4 array, four 1x8 surfaces, K=3 users."""
    return SimConfig().validate()


@pytest.fixture(scope="session")
def small_config():
    """Tiny setup for fast exact checks: 2x2 array, four 1x2 surfaces."""
    return SimConfig(M_x=2, M_z=2, N_j2=2, K=2, L_k=2).validate()


@pytest.fixture(scope="session")
def small_tensors(small_config):
    layout = build_layout(small_config)
    paths = sample_paths(small_config, realization=0)
    return build_tensors(paths, layout)


@pytest.fixture(scope="session")
def default_tensors(default_config):
    layout = build_layout(default_config)
    paths = sample_paths(default_config, realization=0)
    return build_tensors(paths, layout)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
