import numpy as np
import pytest
from hypothesis import settings

from doobtransport.netmodel import EnsembleConfig, IncoherentLink, build_network, random_network, sample_rng

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def toy():
    """Two sites, coupling 1, decay 2 -> 1 with unit rate."""
    return build_network([[0.0, 1.0], [1.0, 0.0]], [IncoherentLink(2, 1, 1.0, 1)])


@pytest.fixture
def damping():
    """Two sites, no coherent coupling, decay 2 -> 1."""
    return build_network(np.zeros((2, 2)), [IncoherentLink(2, 1, 1.0, 1)])


@pytest.fixture
def net7():
    return random_network(7, sample_rng(1, 0))


@pytest.fixture(scope="session")
def seed1_config():
    return EnsembleConfig(n_sites=7, n_samples=1000, tilt=3.5, seed=1, link_rate=1.0)
