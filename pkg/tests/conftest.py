import random

import pytest

from lexmetric.config import bundled_config


@pytest.fixture(scope="session")
def communal():
    return bundled_config()


@pytest.fixture(scope="session")
def cgraph(communal):
    return communal.graph(variant="directed", overrides=False)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
