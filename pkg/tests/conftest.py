import numpy as np
import pytest

from jfrft.fracops import make_graph_fracop, make_time_fracop
from jfrft.graphs import gft_factorize, random_weighted_graph, shift_operator
from jfrft.signals import make_rng


def rel_err(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300))


def graph_op_for(n, seed=0, directed=True, kind="adjacency"):
    g = random_weighted_graph(n, seed, directed=directed)
    return make_graph_fracop(gft_factorize(shift_operator(g, kind)))


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture(scope="session")
def ops_6x5():
    return graph_op_for(6, seed=0), make_time_fracop(5)


@pytest.fixture(scope="session")
def ops_sym_6x5():
    return graph_op_for(6, seed=1, directed=False), make_time_fracop(5)
