import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / np.sqrt(2)


@pytest.fixture
def sym_pair(rng):
    def make(n):
        return sym(rng, n), sym(rng, n)
    return make


@pytest.fixture
def rect_pair(rng):
    def make(n, N):
        return rng.standard_normal((n, N)), rng.standard_normal((n, N))
    return make


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[1:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
