import math

import numpy as np
import pytest

from specgwl._types import CouplingError, DistributionError, InputError, SamplerError
from specgwl.graph_core import build_graph
from specgwl.measures import (
    Coupling,
    NodeDistribution,
    check_coupling,
    constraint_matrix,
    mcmc_step,
    node_distribution,
    permutation_coupling,
    product_coupling,
    sample_couplings,
    sampler_state,
    support_size,
    uniform,
)


class TestNodeDistribution:
    def test_degree_distribution(self):
        g = build_graph([(0, 1), (0, 2)])
        np.testing.assert_allclose(node_distribution(g, 0, 1).weights, [0.5, 0.25, 0.25])

    def test_uniform(self, two_triangles_bridge):
        np.testing.assert_allclose(node_distribution(two_triangles_bridge, 3, 0).weights, 1 / 6)
        np.testing.assert_allclose(uniform(4).weights, 0.25)

    def test_offset_and_exponent(self):
        g = build_graph([(0, 1), (0, 2), (0, 3)])
        weights = node_distribution(g, 1, 0.5).weights
        expected = [2 / (2 + 3 * math.sqrt(2))] + [math.sqrt(2) / (2 + 3 * math.sqrt(2))] * 3
        np.testing.assert_allclose(weights, expected)

    def test_two_node_ratio(self):
        # degrees [3, 1] with a = 1 and b = 0.5 give weights in ratio 2 : sqrt(2)
        g = build_graph([(0, 1), (0, 2), (0, 3)])
        weights = node_distribution(g, 1, 0.5).weights
        assert weights[0] / weights[1] == pytest.approx(2 / math.sqrt(2))

    def test_isolated_node_needs_offset(self):
        g = build_graph([(0, 1)], nodes=[7])
        with pytest.raises(DistributionError):
            node_distribution(g, 0, 1)

        assert node_distribution(g, 1, 1).weights.min() > 0

    @pytest.mark.parametrize("a, b", [(-1, 0.5), (0, 1.5), (0, -0.1)])
    def test_parameter_range(self, k2, a, b):
        with pytest.raises(DistributionError):
            node_distribution(k2, a, b)

    def test_validation(self):
        with pytest.raises(DistributionError):
            NodeDistribution(np.array([0.5, 0.6]))

        with pytest.raises(DistributionError):
            NodeDistribution(np.array([1.0, 0.0]))

    def test_sums_to_one(self, asymmetric_graph):
        assert node_distribution(asymmetric_graph, 0.5, 0.7).weights.sum() == pytest.approx(1, abs=1e-12)


class TestCouplings:
    def test_product(self):
        np.testing.assert_allclose(product_coupling([0.5, 0.5], [0.5, 0.5]).matrix, 0.25)
        np.testing.assert_allclose(product_coupling([1.0], [0.3, 0.7]).matrix, [[0.3, 0.7]])
        c = product_coupling([0.5, 0.25, 0.25], [0.5, 0.5])
        np.testing.assert_allclose(c.matrix, [[0.25, 0.25], [0.125, 0.125], [0.125, 0.125]])
        c.validate()

    def test_permutation(self):
        c = permutation_coupling([2, 0, 1])
        assert c.support_size() == 3
        assert c.matrix[0, 2] == pytest.approx(1 / 3)
        c.validate()

    def test_check_coupling(self):
        with pytest.raises(CouplingError):
            check_coupling(np.array([[0.5, 0.0], [0.0, 0.4]]), [0.5, 0.5], [0.5, 0.5])

        with pytest.raises(CouplingError):
            check_coupling(np.array([[0.6, -0.1], [-0.1, 0.6]]), [0.5, 0.5], [0.5, 0.5])

        with pytest.raises(CouplingError):
            Coupling(np.full((2, 3), 1 / 6), np.full(2, 0.5), np.full(2, 0.5)).validate()

    def test_support_size(self):
        assert support_size(np.array([[0.5, 1e-12], [0.0, 0.5]])) == 2

    def test_constraint_matrix_rank(self):
        matrix = constraint_matrix(3, 4)
        assert matrix.shape == (6, 12)
        assert np.linalg.matrix_rank(matrix) == 6


class TestSampler:
    def test_two_by_two_segment(self):
        state = sampler_state([0.5, 0.5], [0.5, 0.5], seed=3)
        for _ in range(200):
            state = mcmc_step(state)
            c = state.current.matrix
            assert c[0, 0] == pytest.approx(c[1, 1], abs=1e-12)
            assert c[0, 1] == pytest.approx(0.5 - c[0, 0], abs=1e-12)
            assert -1e-12 <= c[0, 0] <= 0.5 + 1e-12

    def test_marginals_preserved(self, rng):
        p = rng.uniform(0.5, 1.5, 4)
        q = rng.uniform(0.5, 1.5, 3)
        p, q = p / p.sum(), q / q.sum()
        state = sampler_state(p, q, seed=7)
        for _ in range(300):
            state = mcmc_step(state)
            check_coupling(state.current.matrix, p, q)
            assert state.current.matrix.min() >= 0

    def test_reproducible(self):
        first = sample_couplings([0.25] * 4, [0.5, 0.5], 5, 20, seed=11)
        second = sample_couplings([0.25] * 4, [0.5, 0.5], 5, 20, seed=11)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_counts(self):
        samples = sample_couplings([0.5, 0.5], [0.5, 0.5], 7, 3)
        assert len(samples) == 7

        (single,) = sample_couplings([0.5, 0.5], [0.25, 0.75], 1, 1)
        single.validate()

        with pytest.raises(InputError):
            sample_couplings([0.5, 0.5], [0.5, 0.5], 0, 1)

    def test_moves_away_from_product(self):
        (sample,) = sample_couplings([1 / 3] * 3, [1 / 3] * 3, 1, 50, seed=2)
        assert not np.allclose(sample.matrix, 1 / 9)

    def test_single_point_polytope(self):
        state = sampler_state([1.0], [0.3, 0.7])
        with pytest.raises(SamplerError):
            mcmc_step(state)
