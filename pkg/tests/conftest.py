import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ALL_SCHEMES = [
    "lagrange",
    "averaged",
    "averaged_corrected",
    "derivative(1,1)",
    "kantorovich(1)",
    "kantorovich_corrected(1)",
]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
