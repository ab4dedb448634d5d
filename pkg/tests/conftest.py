import os
import sys

import pytest

# Add root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.domain import cos_data, disk, ellipse, linear_data


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical checks (deselect with -m 'not slow')")


@pytest.fixture(scope="session")
def unit_disk():
    return disk(1.0, 256)


@pytest.fixture(scope="session")
def wide_ellipse():
    return ellipse((2.0, 1.0), 256)


@pytest.fixture(scope="session")
def cos_f(unit_disk):
    return cos_data(unit_disk)


@pytest.fixture(scope="session")
def linear_f(unit_disk):
    return linear_data(unit_disk, (1.0, 0.0))
