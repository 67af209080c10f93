import pytest
from hypothesis import HealthCheck, settings

from gbsgraphs import embedding

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def embeddable():
    """All 75 (code, spec) pairs, ascending code order."""
    return embedding.enumerate_embeddable()


@pytest.fixture(scope="session")
def specs_by_code(embeddable):
    return dict(embeddable)
