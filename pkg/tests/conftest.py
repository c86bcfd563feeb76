import os
from pathlib import Path

import numpy as np
import pytest

from treesynth import EdgeSelectionInstance, WeightedGraph, find_dataset, random_instance

DATA = Path(__file__).parent / "data"


def random_connected_graph(rng, n, m, weight_range=(1.0, 5.0)):
    """Random connected graph helper shared across test modules."""
    seed = int(rng.integers(0, 2**31 - 1))
    inst = random_instance(
        n=n, m_init=m, weight_range=weight_range, seed=seed, candidate_mode="sampled",
        sample_size=0,
    )
    return inst.base_graph()


def random_add_instance(rng, n, m, c, k, weight_range=(1.0, 5.0)):
    seed = int(rng.integers(0, 2**31 - 1))
    return random_instance(
        n=n, m_init=m, candidate_mode="sampled", sample_size=c, k=k,
        weight_range=weight_range, seed=seed,
    )


@pytest.fixture
def mini_g2o():
    return DATA / "mini.g2o"


@pytest.fixture
def intel_path():
    path = find_dataset("intel.g2o")
    if path is None:
        pytest.skip("intel.g2o not present (set TREECONN_DATA_DIR to enable)")
    return path
