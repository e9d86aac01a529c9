import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from app.models.schemas import Tolerances

settings.register_profile(
    "default",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


@pytest.fixture
def tol():
    """Default numerical tolerances"""
    return Tolerances()


@pytest.fixture
def rng():
    """Seeded generator for the small statistical sweeps"""
    return np.random.default_rng(20240531)


@pytest.fixture
def fig2_pair():
    """Interior pair with four reflection points"""
    return 0.5 + 0.5j, -0.8j


@pytest.fixture
def fig3_pair():
    """Interior pair with only two reflection points"""
    return 0.5 + 0.5j, 0.5 + 0j
