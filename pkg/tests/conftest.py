import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "heatspec", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("heatspec")


@pytest.fixture(scope="session")
def lambda_max():
    return 4e4
