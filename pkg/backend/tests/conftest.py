"""Pytest configuration and fixtures."""
import pytest
import sys
import os

# Add backend directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from deployment import build_scenario
from linkbudget import LinkTable
from models import ScenarioParams

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


@pytest.fixture
def default_params():
    """Default indoor 60 GHz parameters with K=40."""
    return ScenarioParams()


@pytest.fixture
def two_pair_params():
    return ScenarioParams(num_pairs=2)


@pytest.fixture
def hidden_node_scenario(two_pair_params):
    """Pair 1's BS cannot hear BS0, but BS1's mainlobe covers MT0.

    BS0 (0,0) -> MT0 (4,0); BS1 (1,1) -> MT1 (5,1).
    """
    return build_scenario(two_pair_params, [(0, 0), (1, 1)], [(4, 0), (5, 1)])


@pytest.fixture
def hidden_node_table(hidden_node_scenario):
    return LinkTable(hidden_node_scenario)


@pytest.fixture
def facing_scenario(two_pair_params):
    """Two BSs 2 m apart with their mainlobes pointing at each other."""
    return build_scenario(two_pair_params, [(2, 5), (4, 5)], [(6, 5), (0, 5)])


@pytest.fixture
def mirrored_scenario(two_pair_params):
    """Two pairs mirrored about x = 5."""
    return build_scenario(two_pair_params, [(2, 5), (8, 5)], [(6, 5), (4, 5)])


@pytest.fixture
def golden():
    """Read a file from tests/golden."""
    def read(name):
        with open(os.path.join(GOLDEN_DIR, name), encoding="utf-8") as f:
            return f.read()
    return read
