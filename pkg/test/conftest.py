"""
Configuration for pytest.
"""
import numpy as np
import pytest

from usdembed import StateSet, build_lossy
from usdembed.usd import symmetric_pair, symmetric_two_state_probs


def pytest_addoption(parser: pytest.Parser) -> None:
    """
    Add options to pytest.
    """
    parser.addoption('--slow', action='store_true', help='run slow tests')


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    should_skip_slow = not config.getoption("--slow")
    skip_slow = pytest.mark.skip(reason="need --slow option to run")
    for item in items:
        if "slow" in item.keywords and should_skip_slow:
            item.add_marker(skip_slow)


@pytest.fixture
def rng() -> np.random.Generator:
    """
    A seeded random number generator.
    """
    return np.random.default_rng(20240601)


@pytest.fixture
def pair_06() -> StateSet:
    """
    The symmetric pair of real states with overlap 0.6.
    """
    return StateSet(np.stack(symmetric_pair(0.6)))


@pytest.fixture
def lossy_06(pair_06):
    """
    The marginal lossy operator for the overlap 0.6 pair.
    """
    return build_lossy(pair_06, symmetric_two_state_probs(pair_06))
