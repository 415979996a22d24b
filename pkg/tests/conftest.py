# -*- coding: utf-8 -*-
"""
    Shared fixtures for the keyleasing tests.

    Everything runs at reduced parameters (λ=16, n=8, h≤4) so the Monte Carlo
    checks stay fast; tests that need other values build their own parameters.
"""
import pytest

from keyleasing.config import SchemeParams
from keyleasing.prims import IdealBackendRegistry
from keyleasing.rng import stream

SMALL_LAMBDA = 16


@pytest.fixture
def params() -> SchemeParams:
    return SchemeParams(lam=SMALL_LAMBDA, hadamard=3, positions=8)


@pytest.fixture
def tiny_params() -> SchemeParams:
    """h=2 keys have exactly four terms"""
    return SchemeParams(lam=SMALL_LAMBDA, hadamard=2, positions=4)


@pytest.fixture
def rng():
    return stream(20201103, "tests")


@pytest.fixture
def registry(rng) -> IdealBackendRegistry:
    return IdealBackendRegistry(SMALL_LAMBDA, stream(7, "registry"))


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run the full-size Monte Carlo checks",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
