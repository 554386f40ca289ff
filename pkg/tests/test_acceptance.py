"""Seeded end-to-end experiments, run with `pytest -m slow`"""

import numpy as np
import pytest

from specgwl import utils
from specgwl._types import GraphError, PartitionError
from specgwl.barycenter import bootstrap_experiment
from specgwl.graph_core import (
    erdos_renyi,
    generate_gaussian_random_partition,
    generate_sbm,
    graph_heat_kernel,
)
from specgwl.gw_solver import landscape_experiment, spec_gw_distance
from specgwl.interpolate import blowup_coupling, interpolation_frames
from specgwl.matching_eval import matching_benchmark
from specgwl.measures import check_coupling, sample_couplings, uniform
from specgwl.partition import (
    adjusted_mutual_information,
    fiedler_partition,
    partition_graph,
    tune_partition,
)

pytestmark = pytest.mark.slow


def _same_split(a, b) -> bool:
    return adjusted_mutual_information(a, b) > 1 - 1e-9


def _random_pairs(count: int, n: int, p: float, seed: int):
    for index in range(count):
        yield (
            erdos_renyi(n, p, seed=utils.derive_seed(seed, 2 * index)),
            erdos_renyi(n + 1, p, seed=utils.derive_seed(seed, 2 * index + 1)),
        )


def _fiedler_trials(count: int):
    seed = 0
    while count:
        g = erdos_renyi(12, 0.3, seed=seed)
        seed += 1
        try:
            by_sign, balanced = fiedler_partition(g), fiedler_partition(g, balanced=True)
        except (GraphError, PartitionError):
            continue

        count -= 1
        labels, _ = partition_graph(graph_heat_kernel(g, 100, "standard"), uniform(12), 2)
        yield labels, by_sign, balanced


def test_two_way_partition_follows_fiedler():
    trials = list(_fiedler_trials(50))
    assert sum(_same_split(labels, balanced) for labels, _, balanced in trials) >= 48

    # a uniform two-point template forces 6/6 splits, so the sign split
    # can only be reproduced where it is itself balanced
    even = [
        (labels, by_sign)
        for labels, by_sign, _ in trials
        if np.bincount(by_sign, minlength=2).tolist() == [6, 6]
    ]
    assert even
    assert all(_same_split(labels, by_sign) for labels, by_sign in even)


def test_vertex_snap_sparsity():
    for g, h in _random_pairs(50, 20, 0.2, seed=1):
        result = spec_gw_distance(g, uniform(g.n), h, uniform(h.n), 10)
        assert result.coupling.support_size() <= g.n + h.n - 1


def test_landscape_ordering():
    worst = {"adjacency": [], "spectral:10": [], "spectral:20": []}
    times = {kind: [] for kind in worst}
    for g, h in _random_pairs(20, 20, 0.5, seed=2):
        for record in landscape_experiment(g, h, [10, 20], 50, seed=g.m_edges, steps_between=200):
            worst[record.loss_kind].append(record.worst_error)
            times[record.loss_kind].append(record.mean_wall_time)

    means = {kind: np.mean(values) for kind, values in worst.items()}
    assert means["spectral:20"] < means["spectral:10"] < means["adjacency"]
    assert means["spectral:20"] < 0.02

    solve_time = {kind: np.mean(values) for kind, values in times.items()}
    assert solve_time["adjacency"] >= 1.5 * max(solve_time["spectral:10"], solve_time["spectral:20"])


def test_sbm_partitioning():
    hits = 0
    for seed in range(10):
        g, truth = generate_sbm([30, 30, 30], 0.5, 0.05, seed=seed)
        tuned = tune_partition(g, [3], [5, 10, 20])
        hits += adjusted_mutual_information(truth, tuned.labels) >= 0.95

    assert hits >= 9


def test_sbm_cluster_count():
    hits = 0
    for seed in range(10):
        g, truth = generate_sbm([20] * 5, 0.6, 0.02, seed=100 + seed)
        tuned = tune_partition(g, range(2, 9), [5, 10, 20])
        hits += tuned.k == 5 and adjusted_mutual_information(truth, tuned.labels) >= 0.9

    assert hits >= 8


def test_gaussian_partition_spectral_beats_adjacency():
    wins = 0
    for seed in range(10):
        g, truth = generate_gaussian_random_partition(300, 50, 0.5, 0.08, directed=True, seed=seed)
        spectral = tune_partition(g, range(4, 9), [5, 10, 20], threads=4)
        adjacency = tune_partition(g, range(4, 9), [], loss="adjacency", threads=4)
        wins += adjusted_mutual_information(truth, spectral.labels) > adjusted_mutual_information(
            truth, adjacency.labels
        )

    assert wins >= 8


def test_long_sampler_chain():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    q = np.array([0.5, 0.25, 0.25])
    for sample in sample_couplings(p, q, 10_000, 1, seed=5):
        check_coupling(sample.matrix, p, q, 1e-9)
        assert sample.matrix.min() >= -1e-12

    free = [s.matrix[0, 0] for s in sample_couplings([0.5, 0.5], [0.5, 0.5], 10_000, 1, seed=6)]
    assert min(free) < 0.05 and max(free) > 0.45


def test_matching_spectral_not_worse():
    graphs = [erdos_renyi(30, 0.13, seed=utils.derive_seed(3, index)) for index in range(20)]

    # (a, b) of the node distribution tuned separately for every loss
    def best_mean(loss_kind, t=None):
        return max(
            matching_benchmark(graphs, loss_kind, t, dist_params, seed=7, threads=4).summary["mean"]
            for dist_params in [(0.0, 0.0), (1.0, 1.0)]
        )

    assert best_mean("spectral", 10.0) >= best_mean("adjacency")


def test_barycenter_stability():
    g, _ = generate_sbm([20, 20, 20], 0.4, 0.05, seed=11)
    _, summary = bootstrap_experiment(g, t_values=(7.0,), seed=4, threads=4)
    variances = {entry["representation"]: entry["variance"] for entry in summary}
    assert variances["adjacency"] >= 10 * variances["spectral:7"]


def test_blowup_fidelity():
    for g, h in list(_random_pairs(10, 20, 0.2, seed=1)):
        c = spec_gw_distance(g, uniform(g.n), h, uniform(h.n), 10).coupling.matrix
        blowup = blowup_coupling(c)
        np.testing.assert_allclose(blowup.aggregate_to(c.shape), c, atol=1e-12)

        first, last = (frame.edges for frame in interpolation_frames(g, h, c, 2))
        source = {tuple(sorted((blowup.row_map[i], blowup.row_map[j]))) for i, j, _ in first}
        target_nodes = blowup.col_map[blowup.matching]
        target = {tuple(sorted((target_nodes[i], target_nodes[j]))) for i, j, _ in last}
        assert {tuple(map(int, e)) for e in source} == set(g.edges)
        assert {tuple(map(int, e)) for e in target} == set(h.edges)
