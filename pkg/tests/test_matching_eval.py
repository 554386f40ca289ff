import numpy as np
import pytest

from specgwl._types import CouplingError, DistributionError, InputError
from specgwl.graph_core import build_graph
from specgwl.matching_eval import (
    PermutedPair,
    identity_pair,
    matching_benchmark,
    node_correctness,
    permute_graph,
    scale_sweep,
)
from specgwl.measures import permutation_coupling, product_coupling


class TestPermute:
    def test_single_node(self):
        g = build_graph([(0, 0)], directed=True)
        assert permute_graph(g, seed=5).permutation.tolist() == [0]

    def test_isomorphic(self, asymmetric_graph):
        pair = permute_graph(asymmetric_graph, seed=2)
        sigma = pair.permutation
        np.testing.assert_array_equal(pair.permuted.adjacency[np.ix_(sigma, sigma)], asymmetric_graph.adjacency)

    def test_reproducible(self, asymmetric_graph):
        first = permute_graph(asymmetric_graph, seed=7).permutation
        second = permute_graph(asymmetric_graph, seed=7).permutation
        np.testing.assert_array_equal(first, second)

    def test_k2_either_way(self, k2):
        pair = permute_graph(k2, seed=1)
        assert pair.permuted.edges == k2.edges


class TestNodeCorrectness:
    def test_exact_matching(self, asymmetric_graph):
        pair = permute_graph(asymmetric_graph, seed=3)
        score = node_correctness(permutation_coupling(pair.permutation), pair)
        assert score.node_correctness == 1.0

    def test_product_coupling(self, k2):
        score = node_correctness(product_coupling([0.5, 0.5], [0.5, 0.5]), identity_pair(k2))
        assert score.node_correctness == 0.5

    def test_swapped_matching(self, k2):
        score = node_correctness(permutation_coupling([1, 0]), identity_pair(k2))
        assert score.node_correctness == 0.0

    def test_default_epsilon(self, k2):
        c = np.array([[0.5, 1e-12], [1e-12, 0.5]])
        score = node_correctness(c, identity_pair(k2))
        assert score.node_correctness == 1.0
        assert score.epsilon == pytest.approx(0.5e-9)

    def test_explicit_epsilon(self, k2):
        c = np.array([[0.3, 0.2], [0.2, 0.3]])
        assert node_correctness(c, identity_pair(k2), epsilon=0.25).node_correctness == 1.0

    def test_empty_support(self, k2):
        with pytest.raises(CouplingError):
            node_correctness(np.full((2, 2), 0.25), identity_pair(k2), epsilon=1)

    def test_shape(self, k2, path4):
        with pytest.raises(CouplingError):
            node_correctness(np.full((2, 2), 0.25), PermutedPair(path4, path4, np.arange(4)))


class TestBenchmark:
    def test_single_edges(self):
        graphs = [build_graph([(0, 1)]) for _ in range(3)]
        result = matching_benchmark(graphs, "spectral", 5.0, permute=False, ground_truth_init=True)
        assert result.summary["mean"] == 1.0

    def test_identity_start(self, asymmetric_graph, two_triangles_bridge):
        result = matching_benchmark(
            [asymmetric_graph, two_triangles_bridge],
            "spectral",
            10.0,
            permute=False,
            ground_truth_init=True,
        )
        assert result.summary["mean"] == 1.0
        assert [row["graph_index"] for row in result.rows] == [0, 1]

    def test_rows(self, asymmetric_graph):
        result = matching_benchmark([asymmetric_graph] * 3, "adjacency", seed=4, threads=2)
        assert len(result.rows) == 3
        for row in result.rows:
            assert set(row) == {"graph_index", "n", "m_edges", "loss_kind", "t", "score", "wall_time_s"}
            assert row["loss_kind"] == "adjacency"
            assert row["t"] is None
            assert 0 <= row["score"] <= 1

    def test_permutations_follow_seed(self, asymmetric_graph):
        first = matching_benchmark([asymmetric_graph] * 2, "spectral", 5.0, seed=9)
        second = matching_benchmark([asymmetric_graph] * 2, "spectral", 5.0, seed=9)
        assert [row["score"] for row in first.rows] == [row["score"] for row in second.rows]

    def test_degree_distribution_with_isolated_node(self, asymmetric_graph):
        g = build_graph(sorted(asymmetric_graph.edges), nodes=[6])
        result = matching_benchmark(
            [g], "spectral", 10.0, (1.0, 1.0), permute=False, ground_truth_init=True
        )
        assert result.summary["mean"] == 1.0

        with pytest.raises(DistributionError):
            matching_benchmark([g], "spectral", 10.0, (0.0, 1.0))

    def test_needs_graphs(self):
        with pytest.raises(InputError):
            matching_benchmark([], "adjacency")

    def test_scale_sweep(self, asymmetric_graph):
        sweep = scale_sweep([asymmetric_graph] * 2, [2.0, 10.0], seed=1)
        assert [row["t"] for row in sweep] == [2.0, 10.0]
        for row in sweep:
            assert row["improvement"] == pytest.approx(row["spectral_mean"] - row["adjacency_mean"])
