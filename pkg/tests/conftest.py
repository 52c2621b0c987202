import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def seed_torus():
    from antoine.geom import Plane3
    from antoine.necklace import make_standard_torus
    return make_standard_torus(Plane3.xy(), [0, 0, 0], 1.0, 0.2)


@pytest.fixture(scope="session")
def necklace2(seed_torus):
    from antoine.necklace import build_necklace
    return build_necklace(seed_torus, depth=2)
