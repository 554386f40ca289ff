"""Permutation recovery experiments and node correctness"""

import logging
import time
import typing
from dataclasses import dataclass

import numpy as np

from . import utils
from ._types import CouplingError, InputError
from .graph_core import Graph, LaplacianKind
from .gw_solver import SolverOptions, minimize_gw, representation_pair
from .measures import Coupling, as_matrix, node_distribution

logger = logging.getLogger(__name__)

RELATIVE_EPSILON = 1e-9


@dataclass(frozen=True, eq=False)
class PermutedPair:
    original: Graph
    permuted: Graph
    permutation: np.ndarray
    seed: typing.Optional[int] = None


@dataclass(frozen=True)
class MatchScore:
    node_correctness: float
    epsilon: float


def permute_graph(g: Graph, seed: int = 0) -> PermutedPair:
    """Copy of `g` with node `i` renamed to `sigma[i]` for a uniform random `sigma`"""
    sigma = np.random.default_rng(seed).permutation(g.n)
    return PermutedPair(g, g.relabel(sigma), sigma, seed)


def identity_pair(g: Graph) -> PermutedPair:
    return PermutedPair(g, g, np.arange(g.n), None)


def node_correctness(
    c: typing.Union[Coupling, np.ndarray],
    pair: PermutedPair,
    epsilon: typing.Optional[float] = None,
) -> MatchScore:
    """
    Share of coupling entries above `epsilon` that pair a node with its image
    :param epsilon: Absolute threshold, `1e-9 * max(C)` by default
    """
    c = as_matrix(c)
    n = pair.original.n
    if c.shape != (n, n):
        raise CouplingError(f"Coupling of shape {c.shape} doesn't match {n} nodes")

    epsilon = RELATIVE_EPSILON * float(c.max()) if epsilon is None else float(epsilon)
    support = c > epsilon
    total = int(support.sum())
    if not total:
        raise CouplingError(f"No coupling entry exceeds epsilon={epsilon:.3e}")

    correct = int(support[np.arange(n), pair.permutation].sum())
    return MatchScore(correct / total, epsilon)


def _ground_truth_init(pair: PermutedPair, p: np.ndarray) -> np.ndarray:
    init = np.zeros((pair.original.n, pair.original.n))
    init[np.arange(pair.original.n), pair.permutation] = p
    return init


@dataclass(eq=False)
class BenchmarkResult:
    rows: typing.List[dict]
    summary: dict


def matching_benchmark(
    graphs: typing.Sequence[Graph],
    loss_kind: str,
    t: typing.Optional[float] = None,
    dist_params: typing.Tuple[float, float] = (0.0, 0.0),
    seed: int = 0,
    opts: typing.Optional[SolverOptions] = None,
    threads: int = 1,
    permute: bool = True,
    ground_truth_init: bool = False,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> BenchmarkResult:
    """
    Permute every graph, match it back to the original and score the coupling
    :param permute: Use the identity instead of a random permutation
    :param ground_truth_init: Start the solver from the true matching
    """
    if not graphs:
        raise InputError("Benchmark needs at least one graph")

    opts = opts or SolverOptions()
    a, b = dist_params

    def run(item: typing.Tuple[int, Graph]) -> dict:
        index, g = item
        started = time.perf_counter()
        pair = permute_graph(g, utils.derive_seed(seed, index)) if permute else identity_pair(g)
        p = node_distribution(pair.original, a, b)
        q = node_distribution(pair.permuted, a, b)
        rep = representation_pair(pair.original, pair.permuted, loss_kind, t, kind)
        init = _ground_truth_init(pair, p.weights) if ground_truth_init else None
        result = minimize_gw(rep, p, q, opts.with_init(init))
        score = node_correctness(result.coupling, pair)
        return {
            "graph_index": index,
            "n": g.n,
            "m_edges": g.m_edges,
            "loss_kind": rep.label,
            "t": t if rep.label != "adjacency" else None,
            "score": score.node_correctness,
            "wall_time_s": time.perf_counter() - started,
        }

    rows = utils.fan_out(run, list(enumerate(graphs)), threads)
    scores = np.array([row["score"] for row in rows])
    summary = {
        "loss_kind": rows[0]["loss_kind"],
        "n_graphs": len(rows),
        "mean": float(scores.mean()),
        "std": float(scores.std()),
        "total_wall_time_s": float(sum(row["wall_time_s"] for row in rows)),
    }
    logger.info(
        f"{summary['loss_kind']} node correctness {summary['mean']:.3f} ± {summary['std']:.3f} "
        f"over {len(rows)} graphs"
    )
    return BenchmarkResult(rows, summary)


def scale_sweep(
    graphs: typing.Sequence[Graph],
    t_values: typing.Sequence[float],
    dist_params: typing.Tuple[float, float] = (0.0, 0.0),
    seed: int = 0,
    opts: typing.Optional[SolverOptions] = None,
    threads: int = 1,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> typing.List[dict]:
    """Spectral benchmark per `t` next to the adjacency baseline on the same permutations"""
    baseline = matching_benchmark(
        graphs, "adjacency", None, dist_params, seed, opts, threads
    ).summary["mean"]

    sweep = []
    for t in t_values:
        mean = matching_benchmark(
            graphs, "spectral", float(t), dist_params, seed, opts, threads, kind=kind
        ).summary["mean"]
        sweep.append(
            {
                "t": float(t),
                "spectral_mean": mean,
                "adjacency_mean": baseline,
                "improvement": mean - baseline,
            }
        )

    return sweep
