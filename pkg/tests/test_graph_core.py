import math

import numpy as np
import pytest

from specgwl._types import GraphError, InputError
from specgwl.graph_core import (
    LaplacianKind,
    add_noise_edges,
    build_graph,
    eigendecompose,
    erdos_renyi,
    generate_gaussian_random_partition,
    generate_sbm,
    graph_heat_kernel,
    heat_kernel,
    induced_subgraph,
    laplacian,
    random_sbm_dataset,
    resolve_laplacian_kind,
    symmetrize,
)


class TestBuildGraph:
    def test_string_ids(self):
        g = build_graph([("a", "b"), ("b", "c")])
        assert g.n == 3
        assert g.edges == {(0, 1), (1, 2)}
        assert g.node_ids == ("a", "b", "c")

    def test_directed_keeps_both_directions(self):
        g = build_graph([(0, 1), (1, 0)], directed=True)
        assert g.n == 2
        assert g.edges == {(0, 1), (1, 0)}

    def test_duplicates_collapse(self):
        assert build_graph([(0, 1), (0, 1)]).m_edges == 1
        assert build_graph([(0, 1), (1, 0)]).m_edges == 1

    def test_empty_edge_list(self):
        with pytest.raises(GraphError):
            build_graph([])

    def test_self_loop_rejected_when_undirected(self):
        with pytest.raises(GraphError):
            build_graph([(0, 0)])

    def test_isolated_nodes(self):
        g = build_graph([("x", "y")], nodes=["z"])
        assert g.n == 3
        assert g.degrees().tolist() == [0, 1, 1]

    def test_adjacency_is_read_only(self, k2):
        with pytest.raises(ValueError):
            k2.adjacency[0, 0] = 1

    def test_relabel(self, path4):
        g = path4.relabel([3, 2, 1, 0])
        assert g.edges == path4.edges
        assert g.node_ids == (3, 2, 1, 0)

        with pytest.raises(GraphError):
            path4.relabel([0, 0, 1, 2])


class TestLaplacian:
    def test_k2_standard(self, k2):
        np.testing.assert_allclose(laplacian(k2, "standard"), [[1, -1], [-1, 1]])

    def test_k2_normalized(self, k2):
        np.testing.assert_allclose(laplacian(k2, LaplacianKind.NORMALIZED), [[1, -1], [-1, 1]])

    def test_directed_two_cycle(self):
        g = build_graph([(0, 1), (1, 0)], directed=True)
        np.testing.assert_allclose(laplacian(g, "directed_chung"), [[1, -1], [-1, 1]], atol=1e-12)

    def test_directed_three_cycle_is_symmetric_psd(self):
        g = build_graph([(0, 1), (1, 2), (2, 0), (0, 2)], directed=True)
        lap = laplacian(g, "directed_chung")
        np.testing.assert_allclose(lap, lap.T, atol=1e-12)
        assert np.linalg.eigvalsh(lap).min() > -1e-10

    def test_chung_needs_strong_connectivity(self):
        g = build_graph([(0, 1), (1, 2)], directed=True)
        with pytest.raises(GraphError):
            laplacian(g, "directed_chung")

    def test_chung_needs_directed_graph(self, k2):
        with pytest.raises(GraphError):
            laplacian(k2, "directed_chung")

    def test_normalized_rejects_isolated_nodes(self):
        g = build_graph([(0, 1)], nodes=[5])
        with pytest.raises(GraphError):
            laplacian(g, "normalized")

    def test_unknown_kind(self, k2):
        with pytest.raises(InputError):
            laplacian(k2, "combinatorial")

    def test_resolve_kind(self, k2):
        assert resolve_laplacian_kind(k2) == LaplacianKind.NORMALIZED
        assert resolve_laplacian_kind(build_graph([(0, 1)], nodes=[9])) == LaplacianKind.STANDARD
        assert (
            resolve_laplacian_kind(build_graph([(0, 1), (1, 0)], directed=True))
            == LaplacianKind.DIRECTED_CHUNG
        )
        with pytest.raises(GraphError):
            resolve_laplacian_kind(k2, build_graph([(0, 1)], directed=True))


class TestSpectrum:
    def test_k2(self, k2):
        spectrum = eigendecompose(laplacian(k2, "standard"))
        np.testing.assert_allclose(spectrum.eigenvalues, [0, 2], atol=1e-12)
        np.testing.assert_allclose(
            np.abs(spectrum.eigenvectors), np.full((2, 2), 1 / math.sqrt(2)), atol=1e-12
        )

    def test_null_operator(self):
        spectrum = eigendecompose(np.zeros((3, 3)))
        np.testing.assert_array_equal(spectrum.eigenvalues, [0, 0, 0])

    def test_path_spectrum(self, path4):
        spectrum = eigendecompose(laplacian(path4, "standard"))
        expected = sorted(2 - 2 * math.cos(k * math.pi / 4) for k in range(4))
        np.testing.assert_allclose(spectrum.eigenvalues, expected, atol=1e-10)

        # Roots of the characteristic polynomial
        roots = np.sort(np.roots(np.poly(laplacian(path4, "standard"))).real)
        np.testing.assert_allclose(spectrum.eigenvalues, roots, atol=1e-8)

    def test_reconstruction(self, two_triangles_bridge):
        lap = laplacian(two_triangles_bridge, "normalized")
        spectrum = eigendecompose(lap)
        phi = spectrum.eigenvectors
        np.testing.assert_allclose(phi @ np.diag(spectrum.eigenvalues) @ phi.T, lap, atol=1e-10)
        np.testing.assert_allclose(phi.T @ phi, np.eye(6), atol=1e-10)

    def test_sign_convention(self, path4):
        spectrum = eigendecompose(laplacian(path4, "standard"))
        for column in spectrum.eigenvectors.T:
            assert column[np.argmax(np.abs(column) >= np.abs(column).max() - 1e-12)] > 0

    def test_asymmetric_input(self):
        with pytest.raises(InputError):
            eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_constant_null_mode(self, two_triangles_bridge):
        assert eigendecompose(laplacian(two_triangles_bridge, "standard")).has_constant_null_mode
        assert not eigendecompose(
            laplacian(two_triangles_bridge, "normalized")
        ).has_constant_null_mode


class TestHeatKernel:
    def test_time_zero(self, two_triangles_bridge):
        kernel = graph_heat_kernel(two_triangles_bridge, 0)
        np.testing.assert_array_equal(kernel.matrix, np.eye(6))

    @pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
    def test_k2_closed_form(self, k2, t):
        kernel = heat_kernel(eigendecompose(laplacian(k2, "standard")), t)
        same, other = (1 + math.exp(-2 * t)) / 2, (1 - math.exp(-2 * t)) / 2
        np.testing.assert_allclose(kernel.matrix, [[same, other], [other, same]], atol=1e-12)

    def test_long_time_limit(self, two_triangles_bridge):
        kernel = graph_heat_kernel(two_triangles_bridge, 1e3, "standard")
        np.testing.assert_allclose(kernel.matrix, np.full((6, 6), 1 / 6), atol=1e-6)

    def test_properties(self, asymmetric_graph):
        matrix = graph_heat_kernel(asymmetric_graph, 2.5, "standard").matrix
        np.testing.assert_allclose(matrix, matrix.T, atol=1e-12)
        assert np.linalg.eigvalsh(matrix).min() > 0
        np.testing.assert_allclose(matrix.sum(axis=1), 1, atol=1e-10)

    def test_reduced_kernel_differs_by_constant(self, asymmetric_graph):
        kernel = graph_heat_kernel(asymmetric_graph, 20, "standard")
        difference = kernel.matrix - kernel.reduced
        np.testing.assert_allclose(difference, np.full((6, 6), 1 / 6), atol=1e-12)

    def test_negative_time(self, k2):
        with pytest.raises(InputError):
            graph_heat_kernel(k2, -1)

    def test_trace_decreases(self, asymmetric_graph):
        traces = [graph_heat_kernel(asymmetric_graph, t).trace() for t in (0, 1, 5, 20)]
        assert traces == sorted(traces, reverse=True)


class TestGenerators:
    def test_sbm_extremes(self):
        g, labels = generate_sbm([3, 3], 1.0, 0.0, seed=3)
        assert g.edges == {(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)}
        assert labels.tolist() == [0, 0, 0, 1, 1, 1]

    def test_sbm_single_block(self):
        g, _ = generate_sbm([2], 1.0, 0.0)
        assert g.edges == {(0, 1)}

    def test_sbm_density(self):
        g, labels = generate_sbm([30, 30, 30], 0.5, 0.05, seed=11)
        a = g.adjacency
        same = labels[:, None] == labels[None, :]
        np.fill_diagonal(same, False)
        within = a[same].mean()
        across = a[labels[:, None] != labels[None, :]].mean()
        assert abs(within - 0.5) < 0.05
        assert abs(across - 0.05) < 0.02

    def test_sbm_reproducible(self):
        assert generate_sbm([5, 5], 0.6, 0.1, seed=4)[0] == generate_sbm([5, 5], 0.6, 0.1, seed=4)[0]

    def test_sbm_rejects_bad_probabilities(self):
        with pytest.raises(InputError):
            generate_sbm([3, 3], 1.5, 0.0)

        with pytest.raises(InputError):
            generate_sbm([3, 3], 0.5, np.ones((3, 3)))

    def test_sbm_per_pair_matrix(self):
        cross = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        g, _ = generate_sbm([2, 2, 2], 0.0, cross, seed=1)
        assert g.edges == {(0, 2), (0, 3), (1, 2), (1, 3)}
        with pytest.raises(InputError, match="symmetric"):
            generate_sbm([2, 2, 2], 0.0, np.triu(cross), seed=1)

    def test_gaussian_partition_cliques(self):
        g, labels = generate_gaussian_random_partition(40, 8, 1.0, 0.0, seed=2)
        assert g.n == 40
        same = labels[:, None] == labels[None, :]
        np.fill_diagonal(same, False)
        np.testing.assert_array_equal(g.adjacency, same.astype(float))

    def test_gaussian_partition_reproducible_directed(self):
        first, labels = generate_gaussian_random_partition(60, 15, 0.5, 0.08, directed=True, seed=9)
        second, _ = generate_gaussian_random_partition(60, 15, 0.5, 0.08, directed=True, seed=9)
        assert first.directed and first == second
        assert len(labels) == 60

    def test_erdos_renyi(self):
        g = erdos_renyi(50, 0.2, seed=5)
        assert abs(g.m_edges / (50 * 49 / 2) - 0.2) < 0.05
        assert erdos_renyi(10, 0.0).m_edges == 0

    def test_symmetrize(self):
        g = build_graph([(0, 1), (1, 0), (1, 2)], directed=True)
        assert symmetrize(g).edges == {(0, 1), (1, 2)}
        assert not symmetrize(g).directed

    def test_noise_edges(self, asymmetric_graph):
        noisy = add_noise_edges(asymmetric_graph, 0.5, seed=1)
        assert asymmetric_graph.edges < noisy.edges
        assert noisy.m_edges == asymmetric_graph.m_edges + 3

    def test_random_dataset(self):
        dataset = random_sbm_dataset(3, 2, (4, 6), 0.9, 0.1, seed=8)
        assert len(dataset) == 3
        for g, labels in dataset:
            assert 8 <= g.n <= 12
            assert len(labels) == g.n

    def test_induced_subgraph(self, two_triangles_bridge):
        sub = induced_subgraph(two_triangles_bridge, [3, 2, 1])
        assert sub.edges == {(0, 1), (1, 2)}
        assert sub.node_ids == (3, 2, 1)
