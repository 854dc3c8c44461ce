import numpy as np
import pytest

from fas_secrecy.channel import square_grid_geometry, tas_geometry
from fas_secrecy.config import build_distributions, build_scenario, default_config
from fas_secrecy.distribution import make_distribution


@pytest.fixture(scope="session")
def default_cfg():
    return default_config()


@pytest.fixture(scope="session")
def default_dists(default_cfg):
    return build_distributions(default_cfg)


@pytest.fixture(scope="session")
def dist_n4():
    """2x2 grid over 1 wl^2, the workhorse preset."""
    return make_distribution(square_grid_geometry(4, 1.0), cdf_accuracy=1e-6, seed=11)


@pytest.fixture(scope="session")
def dist_n9():
    """3x3 grid over 4 wl^2."""
    return make_distribution(square_grid_geometry(9, 4.0), cdf_accuracy=1e-6, seed=12)


@pytest.fixture(scope="session")
def dist_tas():
    return make_distribution(tas_geometry(), seed=13)


def scenario_at(cfg, dists, **snr_db):
    """(ScenarioParams, SecrecyConfig) with SNR overrides given in dB."""
    ov = {k: 10.0 ** (v / 10.0) for k, v in snr_db.items()}
    return build_scenario(cfg, dists, ov)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240810)
