"""Template-based GW partitioning, Fiedler splits, scores and scale tuning"""

import logging
import math
import typing
from dataclasses import dataclass, field

import numpy as np
from sklearn.metrics import adjusted_mutual_info_score

from . import utils
from ._types import GraphError, PartitionError
from .graph_core import (
    Graph,
    HeatKernel,
    LaplacianKind,
    eigendecompose,
    heat_kernel,
    laplacian,
    resolve_laplacian_kind,
)
from .gw_solver import RepresentationKind, RepresentationPair, SolverOptions, minimize_gw
from .measures import Coupling, Weights, as_weights, node_distribution

logger = logging.getLogger(__name__)

STAGE_ONE_T = 10.0
MULTIPLICITY_TOLERANCE = 1e-8
ZERO_ENTRY = 1e-12

PartitionLabels = np.ndarray


@dataclass(frozen=True, eq=False)
class PartitionTemplate:
    q: np.ndarray
    Q: np.ndarray

    @property
    def m(self) -> int:
        return len(self.q)


@dataclass(eq=False)
class TuneResult:
    k: int
    t: typing.Optional[float]
    labels: PartitionLabels
    modularity: float
    grid: typing.List[dict] = field(default_factory=list, repr=False)


def partition_template(p: Weights, m: int) -> PartitionTemplate:
    """
    Template of `m` self-looped nodes whose masses are spread evenly over
    the sorted weights of `p`, then renormalized
    """
    weights = np.sort(as_weights(p))[::-1]
    n = len(weights)
    if not 2 <= m <= n:
        raise PartitionError(f"Cluster count must be between 2 and {n}, got {m}")

    positions = [math.floor((n - 1) * j / (m - 1) + 0.5) for j in range(m)]
    q = weights[positions]
    q = q / q.sum()
    return PartitionTemplate(q, np.diag(q))


def _labels_from_coupling(coupling: np.ndarray) -> PartitionLabels:
    # argmax returns the first maximum, i.e. the lowest column on ties
    return np.argmax(coupling, axis=1)


def partition_graph(
    rep_matrix: typing.Union[np.ndarray, HeatKernel],
    p: Weights,
    m: int,
    opts: typing.Optional[SolverOptions] = None,
) -> typing.Tuple[PartitionLabels, Coupling]:
    """
    Match a graph representation against the `m`-node partition template
    Node `i` gets the template column holding most of its mass
    :param rep_matrix: Heat kernel (spectral) or adjacency matrix of the graph
    """
    template = partition_template(p, m)
    if isinstance(rep_matrix, HeatKernel):
        rep = RepresentationPair(
            rep_matrix.matrix,
            template.Q,
            RepresentationKind.SPECTRAL,
            rep_matrix.time,
            rep_matrix.reduced,
        )
    else:
        rep = RepresentationPair(rep_matrix, template.Q)

    result = minimize_gw(rep, p, template.q, opts)
    return _labels_from_coupling(result.coupling.matrix), result.coupling


def fiedler_partition(
    g: Graph,
    balanced: bool = False,
    kind: typing.Union[LaplacianKind, str] = LaplacianKind.STANDARD,
) -> PartitionLabels:
    """
    Two-way split by the Fiedler vector
    :param balanced: Split at the median instead of the sign: the first
                     `ceil(n / 2)` nodes by decreasing entry get label 0
    """
    if g.directed:
        raise GraphError("Fiedler partitioning needs an undirected graph")

    if g.n < 2 or not g.is_connected():
        raise GraphError("Fiedler partitioning needs a connected graph")

    spectrum = eigendecompose(laplacian(g, kind))
    values = spectrum.eigenvalues
    if g.n > 2 and values[2] - values[1] < MULTIPLICITY_TOLERANCE:
        raise PartitionError("Second Laplacian eigenvalue is not simple")

    vector = spectrum.eigenvectors[:, 1]
    if balanced:
        labels = np.ones(g.n, dtype=int)
        labels[np.argsort(-vector, kind="stable")[: math.ceil(g.n / 2)]] = 0
        return labels

    return (vector < -ZERO_ENTRY).astype(int)


def modularity(g: Graph, labels: typing.Sequence[int]) -> float:
    """Newman modularity, digraphs are scored on (A + A^T) / 2"""
    labels = np.asarray(labels)
    if len(labels) != g.n:
        raise PartitionError(f"Expected {g.n} labels, got {len(labels)}")

    a = np.array(g.adjacency)
    if g.directed:
        a = (a + a.T) / 2

    total = a.sum()
    if total == 0:
        raise PartitionError("Modularity is undefined for a graph without edges")

    _, codes = np.unique(labels, return_inverse=True)
    membership = np.eye(codes.max() + 1)[codes]
    degrees = a.sum(axis=1)
    within = np.trace(membership.T @ a @ membership)
    expected = np.sum((membership.T @ degrees) ** 2) / total
    return float((within - expected) / total)


def _canonical(labels: typing.Sequence) -> typing.Tuple[int, ...]:
    codes = {}
    return tuple(codes.setdefault(label, len(codes)) for label in labels)


def adjusted_mutual_information(a: typing.Sequence, b: typing.Sequence) -> float:
    """AMI with max-entropy normalization; exactly symmetric in its arguments"""
    if len(a) != len(b):
        raise PartitionError(f"Labelings have different lengths: {len(a)} vs {len(b)}")

    first, second = sorted([_canonical(a), _canonical(b)])
    return float(adjusted_mutual_info_score(first, second, average_method="max"))


def _evaluate(
    g: Graph,
    p: Weights,
    k: int,
    t: typing.Optional[float],
    spectrum,
    opts: typing.Optional[SolverOptions],
) -> dict:
    rep_matrix = g.adjacency if t is None else heat_kernel(spectrum, t)
    labels, _ = partition_graph(rep_matrix, p, k, opts)
    return {"k": k, "t": t, "labels": labels, "modularity": modularity(g, labels)}


def _best(rows: typing.List[dict]) -> dict:
    return min(rows, key=lambda row: (-row["modularity"], row["k"], row["t"] or 0))


def tune_partition(
    g: Graph,
    k_range: typing.Sequence[int],
    t_range: typing.Sequence[float],
    opts: typing.Optional[SolverOptions] = None,
    p: typing.Optional[Weights] = None,
    loss: str = RepresentationKind.SPECTRAL.value,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
    stage_one_t: float = STAGE_ONE_T,
    threads: int = 1,
) -> TuneResult:
    """
    Unsupervised choice of cluster count and diffusion time
    First `k` is picked by modularity at `stage_one_t`, then `t` for that `k`
    The adjacency loss has no time scale and only runs the first stage
    """
    if not k_range or (loss != RepresentationKind.ADJACENCY.value and not t_range):
        raise PartitionError("Tuning ranges must be nonempty")

    p = node_distribution(g) if p is None else p
    spectral = loss != RepresentationKind.ADJACENCY.value
    spectrum = (
        eigendecompose(laplacian(g, resolve_laplacian_kind(g) if kind is None else kind))
        if spectral
        else None
    )
    first_t = stage_one_t if spectral else None

    stage_one = utils.fan_out(
        lambda k: _evaluate(g, p, int(k), first_t, spectrum, opts),
        k_range,
        threads,
    )
    best = _best(stage_one)
    grid = [{**row, "stage": 1} for row in stage_one]

    if spectral:
        stage_two = utils.fan_out(
            lambda t: _evaluate(g, p, best["k"], float(t), spectrum, opts),
            t_range,
            threads,
        )
        best = _best(stage_two)
        grid += [{**row, "stage": 2} for row in stage_two]

    logger.info(
        f"Tuned partition: k={best['k']} t={best['t']} modularity={best['modularity']:.4f}"
    )
    return TuneResult(
        best["k"],
        best["t"],
        best["labels"],
        best["modularity"],
        [{key: row[key] for key in ("stage", "k", "t", "modularity")} for row in grid],
    )


def cross_validate_t(
    dataset: typing.Sequence[typing.Tuple[Graph, typing.Sequence[int]]],
    t_range: typing.Sequence[float],
    opts: typing.Optional[SolverOptions] = None,
    threads: int = 1,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> typing.List[dict]:
    """
    Supervised leave-one-out choice of `t`
    Each graph is scored at the `t` maximizing total AMI on all other graphs;
    the cluster count is taken from its ground truth
    """
    if len(dataset) < 2 or not t_range:
        raise PartitionError("Cross-validation needs two graphs and a nonempty t range")

    def score(item: typing.Tuple[Graph, typing.Sequence[int]]) -> typing.List[float]:
        g, truth = item
        spectrum = eigendecompose(
            laplacian(g, resolve_laplacian_kind(g) if kind is None else kind)
        )
        k = len(set(truth))
        return [
            adjusted_mutual_information(
                truth,
                _evaluate(g, node_distribution(g), k, float(t), spectrum, opts)["labels"],
            )
            for t in t_range
        ]

    scores = np.array(utils.fan_out(score, dataset, threads))
    folds = []
    for held_out in range(len(dataset)):
        others = np.delete(scores, held_out, axis=0).sum(axis=0)
        chosen = int(np.argmax(others))
        folds.append(
            {
                "held_out": held_out,
                "t": float(t_range[chosen]),
                "ami": float(scores[held_out, chosen]),
            }
        )

    return folds
