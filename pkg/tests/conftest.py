"""Shared fixtures."""

import os

import pytest

from robust_xbar.core.types import LocationKind, ScaleKind, Subgroup
from robust_xbar.factors.table import build_table

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
PISTON_RINGS = os.path.join(DATA_DIR, "piston_rings.csv")

SIMULATED = (
    LocationKind.MEDIAN,
    LocationKind.HL1,
    LocationKind.HL2,
    LocationKind.HL3,
    ScaleKind.MAD,
    ScaleKind.SHAMOS,
)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte-Carlo tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte-Carlo reproductions, run with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def factor_table():
    """Desk-scale table: every simulated estimator for n = 2..20."""
    return build_table(SIMULATED, (2, 20), replications=20_000, seed=7)


@pytest.fixture
def ragged_samples():
    return [
        Subgroup.of("1", [10.2, 9.8, 10.1]),
        Subgroup.of("2", [9.9, 10.4, 10.0, 9.7]),
        Subgroup.of("3", [10.3, 10.1, 9.6, 10.0, 9.9]),
        Subgroup.of("4", [10.0, 10.2, 9.8, 10.1]),
    ]


@pytest.fixture
def piston_rings():
    if not os.path.exists(PISTON_RINGS):
        pytest.skip(f"piston-ring dataset not found at {PISTON_RINGS}; see data/README.md")
    from robust_xbar.cli.datasets import read_dataset

    return read_dataset(PISTON_RINGS)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("SPC_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture(autouse=True)
def memory_ledger():
    from robust_xbar.ledger import RunContext, configure_ledger

    RunContext.clear()
    store = configure_ledger("memory")
    yield store
    RunContext.clear()
    configure_ledger("memory")
