import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lpspin.algebra import Signature

settings.register_profile(
    "lpspin", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lpspin")

SIGNATURES = [Signature(0, 3), Signature(1, 3), Signature(2, 3), Signature(0, 5)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=SIGNATURES, ids=str)
def sig(request):
    return request.param
