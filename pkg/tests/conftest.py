# tests/conftest.py
"""
Pytest configuration and fixtures shared by all test modules.
Named graphs, seeded generators, component configurations and a manager.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.analysis.graph_core import (complete_bipartite, complete_bipartite_bg, complete_graph,
                                     cycle_graph, path_graph, petersen_graph, star_graph)
from src.analysis.manager import AnalysisManager
from src.config import RunConfig
from src.models import Graph

DATA_DIR = Path(__file__).parent / 'data'


@pytest.fixture
def data_dir():
    """Directory with the small graph files used by CLI tests"""
    return DATA_DIR


@pytest.fixture
def rng():
    """Seeded generator; every randomized test starts from the same state"""
    return np.random.default_rng(20240611)


@pytest.fixture
def petersen():
    return petersen_graph()


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def p3():
    """Path u-v-w with v at index 1"""
    return path_graph(3)


@pytest.fixture
def star4():
    """K_{1,4} with the centre at index 0"""
    return star_graph(4)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def k23():
    return complete_bipartite(2, 3)


@pytest.fixture
def k23_bipartite():
    return complete_bipartite_bg(2, 3)


@pytest.fixture
def triangle():
    return cycle_graph(3)


@pytest.fixture
def edgeless():
    return Graph(3, [[], [], []])


@pytest.fixture
def run_config():
    """Default run configuration with a fixed seed"""
    return RunConfig(rng_seed=0)


@pytest.fixture
def manager(run_config):
    """Analysis manager wired from the default run configuration"""
    return AnalysisManager(run_config)


@pytest.fixture
def write_graph(tmp_path):
    """Write text to a temporary graph file and return its path as a string"""
    def _write(text: str, name: str = 'graph.txt') -> str:
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write
