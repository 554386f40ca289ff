import os

import numpy as np
import pytest

from specgwl.graph_core import Graph, build_graph


@pytest.fixture
def k2() -> Graph:
    return build_graph([(0, 1)])


@pytest.fixture
def path4() -> Graph:
    return build_graph([(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def two_triangles() -> Graph:
    return build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def two_triangles_bridge() -> Graph:
    return build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


@pytest.fixture
def asymmetric_graph() -> Graph:
    """Connected 6-node graph without nontrivial automorphisms"""
    return build_graph([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 4)])


@pytest.fixture
def asymmetric_pair(asymmetric_graph):
    """The 6-node graph and a 7-node graph containing it"""
    h = build_graph(sorted(asymmetric_graph.edges) + [(6, 0)])
    return asymmetric_graph, h


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def write_edges(path, edges, directed: bool = False) -> str:
    with open(path, "w") as f:
        if directed:
            f.write("directed\n")

        for u, v in edges:
            f.write(f"{u} {v}\n")

    return str(path)


@pytest.fixture
def edge_file(tmp_path):
    def factory(name: str, edges, directed: bool = False) -> str:
        return write_edges(os.path.join(tmp_path, name), edges, directed)

    return factory
