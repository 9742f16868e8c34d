"""Shared test configuration: every test starts at the default working
precision, and hypothesis runs deterministically with no deadline (individual
arbitrary-precision examples can be slow without being wrong)."""
import pytest
from hypothesis import HealthCheck, settings

from oppqbm import mpnum

DEFAULT_DIGITS = 60

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(autouse=True)
def reset_precision():
    """Pin the working precision around every test so a test that raises
    mid-way cannot leak its precision into the next one."""
    mpnum.set_precision(DEFAULT_DIGITS)
    yield
    mpnum.set_precision(DEFAULT_DIGITS)
