import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="also run long sweeps (full odd-size table reproduction and friends)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="long sweep, enable with --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
