import pytest
from hypothesis import HealthCheck, settings
from mpmath import mp

settings.register_profile(
    "hzmt", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("hzmt")


@pytest.fixture(autouse=True)
def _reset_precision():
    saved = mp.dps
    # oracle-side arithmetic runs well above the library's working precision
    mp.dps = 45
    yield
    mp.dps = saved
