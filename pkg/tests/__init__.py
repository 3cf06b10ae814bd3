"""Basic tests package for hcycles."""
import unittest
import shutil
import os

import networkx as nx
import numpy as np

from hcycles import graph

CURRENT_DIR = os.path.dirname(os.path.abspath(__file__))


def random_graph(n, density, mode, seed):
    """Get a seeded random graph with the given edge density."""
    rng = np.random.default_rng(seed)
    adj = rng.random((n, n)) < density
    if mode == graph.UNDIRECTED:
        adj = np.triu(adj, 1)
        adj = adj | adj.T
    np.fill_diagonal(adj, False)
    return graph.Graph(adj, mode)


def complete_graph(n, mode=graph.UNDIRECTED):
    """Get the complete graph K_n."""
    adj = ~np.eye(n, dtype=bool)
    return graph.Graph(adj, mode)


def cycle_graph(n, mode=graph.DIRECTED):
    """Get the cycle 0 -> 1 -> ... -> n-1 -> 0."""
    return graph.Graph.from_edges(
        n, [(v, (v + 1) % n) for v in range(n)], mode)


def to_networkx(g):
    """Get the networkx version of a graph."""
    nx_graph = nx.DiGraph() if g.directed else nx.Graph()
    nx_graph.add_nodes_from(range(g.n))
    nx_graph.add_edges_from(g.edges())
    return nx_graph


def networkx_cycles(g, h):
    """Get every h-cycle of g found by networkx, as vertex sets."""
    return [cycle for cycle in nx.simple_cycles(to_networkx(g),
                                                length_bound=h)
            if len(cycle) == h]


class TestCase(unittest.TestCase):
    """Extended base test case for hcycles tests.

    This class is used as a base that handles a temporary folder for graph
    files and reports written by the tests.
    """

    TEST_TEMP_DIR = os.path.join(CURRENT_DIR, "test_temp_folder")

    def setUp(self):
        self.clear_temp_dir()

    def tearDown(self):
        self.remove_temp_dir()

    def clear_temp_dir(self):
        self.remove_temp_dir()
        os.makedirs(self.TEST_TEMP_DIR)

    def remove_temp_dir(self):
        if os.path.exists(self.TEST_TEMP_DIR):
            shutil.rmtree(self.TEST_TEMP_DIR)

    def temp_path(self, name):
        """Get a path inside the temporary folder."""
        return os.path.join(self.TEST_TEMP_DIR, name)
