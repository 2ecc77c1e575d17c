from pathlib import Path

import numpy as np
import pytest

from delaybounds.function_spaces import VectorPolynomial, make_space

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale runs with full trial counts")


def pytest_collection_modifyitems(config, items):
    if "slow" in (config.getoption("markexpr") or ""):
        return
    skip = pytest.mark.skip(reason="acceptance scale; select with -m slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def unit_interval():
    return make_space("continuous", 0.0, 1.0)


@pytest.fixture
def linear_f():
    """f(t) = (t, 1)."""
    return VectorPolynomial.from_rows([[0.0, 1.0], [1.0]])


@pytest.fixture
def quadratic_f():
    """f(t) = (t², 0)."""
    return VectorPolynomial.from_rows([[0.0, 0.0, 1.0], [0.0]])


@pytest.fixture
def scenarios_dir():
    return SCENARIOS
