"""GW barycenters of representation matrices and the bootstrap averaging experiment"""

import logging
import time
import typing
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import utils
from ._types import InputError
from .graph_core import Graph, graph_heat_kernel, induced_subgraph, resolve_laplacian_kind
from .gw_solver import RepresentationPair, SolverOptions, minimize_gw
from .measures import Weights, as_weights

logger = logging.getLogger(__name__)

Centrality = typing.Callable[[nx.Graph], typing.Dict[int, float]]


@dataclass(eq=False)
class BarycenterProblem:
    representations: typing.List[np.ndarray]
    weights: typing.Optional[np.ndarray] = None
    target_size: typing.Optional[int] = None
    distribution: typing.Optional[Weights] = None
    input_distributions: typing.Optional[typing.List[Weights]] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.representations:
            raise InputError("Barycenter needs at least one representation")

        self.representations = [np.asarray(r, dtype=float) for r in self.representations]
        k = len(self.representations)
        weights = np.full(k, 1 / k) if self.weights is None else np.asarray(self.weights, dtype=float)
        if weights.shape != (k,) or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
            raise InputError("Barycenter weights must be nonnegative and sum to 1")

        self.weights = weights
        if self.target_size is None:
            self.target_size = self.representations[0].shape[0]

        if self.target_size < 1:
            raise InputError(f"Target size must be positive, got {self.target_size}")

        n = self.target_size
        self.distribution = (
            np.full(n, 1 / n) if self.distribution is None else as_weights(self.distribution)
        )
        if len(self.distribution) != n:
            raise InputError("Target distribution doesn't match the target size")

        if self.input_distributions is None:
            self.input_distributions = [
                np.full(r.shape[0], 1 / r.shape[0]) for r in self.representations
            ]

        self.input_distributions = [as_weights(d) for d in self.input_distributions]


def random_init(size: int, seed: int = 0) -> np.ndarray:
    """Symmetric matrix with uniform [0, 1] entries"""
    matrix = np.random.default_rng(seed).uniform(size=(size, size))
    return (matrix + matrix.T) / 2


def _solve_all(
    x: np.ndarray,
    prob: BarycenterProblem,
    opts: SolverOptions,
    couplings: typing.List[typing.Optional[np.ndarray]],
    threads: int,
) -> list:
    def solve(index: int):
        if prob.weights[index] == 0:
            return None

        return minimize_gw(
            RepresentationPair(x, prob.representations[index]),
            prob.distribution,
            prob.input_distributions[index],
            opts.with_init(couplings[index]),
        )

    return utils.fan_out(solve, range(len(prob.representations)), threads)


def frechet_loss(
    barycenter: np.ndarray,
    prob: BarycenterProblem,
    opts: typing.Optional[SolverOptions] = None,
    threads: int = 1,
) -> float:
    """Weighted sum of squared GW distances from `barycenter` to every input"""
    results = _solve_all(
        np.asarray(barycenter, dtype=float),
        prob,
        opts or SolverOptions(),
        [None] * len(prob.representations),
        threads,
    )
    return float(
        sum(w * r.loss for w, r in zip(prob.weights, results) if r is not None)
    )


def gw_barycenter(
    prob: BarycenterProblem,
    init: typing.Union[np.ndarray, int, None] = None,
    opts: typing.Optional[SolverOptions] = None,
    max_outer: int = 100,
    rel_tol: float = 1e-9,
    init_couplings: typing.Optional[typing.List[np.ndarray]] = None,
    threads: int = 1,
) -> typing.Tuple[np.ndarray, typing.List[float]]:
    """
    Block-coordinate descent on the Frechet loss
    Couplings to every input are re-optimized from their previous values,
    then the barycenter is set to sum_i w_i C_i F_i C_i^T / (p p^T)
    :param init: Starting matrix, or a seed for `random_init`
    :returns: Barycenter and the loss after every coupling update
    """
    opts = opts or SolverOptions()
    n = prob.target_size
    if init is None or isinstance(init, (int, np.integer)):
        x = random_init(n, 0 if init is None else int(init))
    else:
        x = np.asarray(init, dtype=float)
        if x.shape != (n, n):
            raise InputError(f"Initial barycenter must be {n}x{n}")

    couplings = list(init_couplings) if init_couplings else [None] * len(prob.representations)
    mass = np.outer(prob.distribution, prob.distribution)
    trace = []

    for _ in range(max_outer):
        results = _solve_all(x, prob, opts, couplings, threads)
        trace.append(
            float(sum(w * r.loss for w, r in zip(prob.weights, results) if r is not None))
        )
        couplings = [None if r is None else r.coupling.matrix for r in results]

        if len(trace) > 1 and abs(trace[-2] - trace[-1]) <= rel_tol * max(
            abs(trace[-1]), np.finfo(float).tiny
        ):
            break

        x = sum(
            w * (c @ f @ c.T)
            for w, c, f in zip(prob.weights, couplings, prob.representations)
            if c is not None
        ) / mass
    else:
        logger.warning(f"Barycenter stopped after {max_outer} rounds without converging")

    logger.debug(f"Barycenter of {len(prob.representations)} inputs: loss {trace[-1]:.6e}")
    return x, trace


def bootstrap_subgraphs(
    g: Graph,
    n_subsets: int = 10,
    subset_size: int = 30,
    pool_size: int = 40,
    seed: int = 0,
    centrality: typing.Optional[Centrality] = None,
) -> typing.List[Graph]:
    """
    Induced subgraphs on `subset_size` nodes drawn from the `pool_size`
    most central nodes
    """
    if not subset_size <= pool_size <= g.n:
        raise InputError(
            f"Need subset_size <= pool_size <= {g.n}, got {subset_size} and {pool_size}"
        )

    scores = (centrality or nx.betweenness_centrality)(g.to_networkx())
    ranking = sorted(range(g.n), key=lambda node: (-scores[node], node))
    pool = np.array(ranking[:pool_size])

    rng = np.random.default_rng(seed)
    return [
        induced_subgraph(g, sorted(rng.choice(pool, size=subset_size, replace=False).tolist()))
        for _ in range(n_subsets)
    ]


def bootstrap_experiment(
    g: Graph,
    t_values: typing.Sequence[float] = (3.0, 7.0, 11.0),
    n_subsets: int = 10,
    subset_size: int = 30,
    pool_size: int = 40,
    n_inits: int = 10,
    seed: int = 0,
    opts: typing.Optional[SolverOptions] = None,
    centrality: typing.Optional[Centrality] = None,
    threads: int = 1,
    max_outer: int = 100,
) -> typing.Tuple[typing.List[dict], typing.List[dict]]:
    """
    Barycenters of bootstrapped subgraphs from several random starts, once for
    adjacency matrices and once per heat kernel time
    :returns: One row per (representation, init) and a per-representation
              summary with the variance of mean-centered final losses
    """
    subgraphs = bootstrap_subgraphs(g, n_subsets, subset_size, pool_size, seed, centrality)
    kind = resolve_laplacian_kind(*subgraphs)
    families = {"adjacency": [s.adjacency for s in subgraphs]}
    for t in t_values:
        families[f"spectral:{t:g}"] = [graph_heat_kernel(s, t, kind).matrix for s in subgraphs]

    rows = []
    summary = []
    for name, representations in families.items():
        prob = BarycenterProblem(representations, target_size=subset_size)
        losses = []
        for index in range(n_inits):
            init_seed = utils.derive_seed(seed, index)
            started = time.perf_counter()
            _, trace = gw_barycenter(prob, init_seed, opts, max_outer, threads=threads)
            losses.append(trace[-1])
            rows.append(
                {
                    "representation": name,
                    "init_seed": init_seed,
                    "final_loss": trace[-1],
                    "rounds": len(trace),
                    "wall_time_s": time.perf_counter() - started,
                }
            )

        centered = np.array(losses) - np.mean(losses)
        summary.append({"representation": name, "variance": float(np.var(centered))})
        logger.info(f"{name}: variance of final losses {summary[-1]['variance']:.3e}")

    return rows, summary
