"""Graphs, Laplacians, spectra, heat kernels and synthetic generators"""

import enum
import functools
import logging
import math
import typing
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import scipy.linalg

from . import utils
from ._types import DecompositionError, GraphError, InputError

logger = logging.getLogger(__name__)

EIGEN_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-8
PERRON_TOLERANCE = 1e-12
PERRON_MAX_ITERS = 10_000


class LaplacianKind(str, enum.Enum):
    STANDARD = "standard"
    NORMALIZED = "normalized"
    DIRECTED_CHUNG = "directed_chung"


@dataclass(frozen=True)
class Graph:
    """
    Unweighted graph on nodes `0..n-1`
    Undirected edges are stored once as `(min, max)`
    `node_ids` keeps the external name of every node
    """

    n: int
    edges: frozenset
    directed: bool = False
    node_ids: tuple = None

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"Node count must be nonnegative, got {self.n}")

        edges = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"Edge ({i}, {j}) references a node outside 0..{self.n - 1}")

            if not self.directed:
                if i == j:
                    raise GraphError(f"Self-loop on node {i} in an undirected graph")

                i, j = min(i, j), max(i, j)

            edges.add((i, j))

        object.__setattr__(self, "edges", frozenset(edges))

        node_ids = tuple(range(self.n)) if self.node_ids is None else tuple(self.node_ids)
        if len(node_ids) != self.n:
            raise GraphError(f"Expected {self.n} node ids, got {len(node_ids)}")

        object.__setattr__(self, "node_ids", node_ids)

    @property
    def m_edges(self) -> int:
        return len(self.edges)

    @functools.cached_property
    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix, symmetric for undirected graphs"""
        a = np.zeros((self.n, self.n))
        if self.edges:
            rows, cols = np.array(sorted(self.edges)).T
            a[rows, cols] = 1.0
            if not self.directed:
                a[cols, rows] = 1.0

        a.setflags(write=False)
        return a

    def degrees(self) -> np.ndarray:
        """Degree of every node; out-degree plus in-degree for digraphs"""
        a = self.adjacency
        if self.directed:
            return a.sum(axis=1) + a.sum(axis=0)

        return a.sum(axis=1)

    def to_networkx(self) -> nx.Graph:
        graph = nx.DiGraph() if self.directed else nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def is_connected(self) -> bool:
        if self.n == 0:
            return False

        graph = self.to_networkx()
        if self.directed:
            return nx.is_strongly_connected(graph)

        return nx.is_connected(graph)

    def relabel(self, mapping: typing.Sequence[int]) -> "Graph":
        """Graph with node `i` renamed to `mapping[i]`"""
        mapping = [int(x) for x in mapping]
        if sorted(mapping) != list(range(self.n)):
            raise GraphError("Relabeling must be a permutation of the node indices")

        ids = [None] * self.n
        for i, target in enumerate(mapping):
            ids[target] = self.node_ids[i]

        return Graph(
            self.n,
            frozenset((mapping[i], mapping[j]) for i, j in self.edges),
            self.directed,
            tuple(ids),
        )


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @functools.cached_property
    def has_constant_null_mode(self) -> bool:
        """First mode is the zero eigenvalue with a constant eigenvector"""
        if not self.n or self.eigenvalues[0] > EIGEN_TOLERANCE:
            return False

        first = self.eigenvectors[:, 0]
        return bool(np.ptp(first) < SYMMETRY_TOLERANCE)


@dataclass(frozen=True, eq=False)
class HeatKernel:
    matrix: np.ndarray
    time: float
    spectrum: Spectrum = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @functools.cached_property
    def reduced(self) -> np.ndarray:
        """
        Kernel without its constant diffusion mode
        Differs from `matrix` by a multiple of the all-ones matrix, which
        shifts GW objectives by a coupling-independent amount
        """
        if (
            self.spectrum is None
            or self.time == 0
            or not self.spectrum.has_constant_null_mode
        ):
            return self.matrix

        phi = self.spectrum.eigenvectors[:, 1:]
        decay = np.exp(-self.time * self.spectrum.eigenvalues[1:])
        reduced = (phi * decay) @ phi.T
        return (reduced + reduced.T) / 2

    def trace(self) -> float:
        return float(np.trace(self.matrix))


def build_graph(
    edge_list: typing.Iterable[typing.Tuple[typing.Any, typing.Any]],
    directed: bool = False,
    nodes: typing.Optional[typing.Iterable[typing.Any]] = None,
) -> Graph:
    """
    Build a graph out of node-id pairs
    :param edge_list: Pairs of arbitrary hashable node ids
    :param directed: Keep edge direction
    :param nodes: Ids to register before the edges (isolated nodes)
    :returns: Graph with dense indices in first-appearance order
    """
    edge_list = list(edge_list)
    if not edge_list:
        raise GraphError("Edge list is empty")

    index = {}
    for node in nodes or []:
        index.setdefault(node, len(index))

    edges = set()
    for pair in edge_list:
        if len(pair) != 2:
            raise GraphError(f"Edge {pair!r} must consist of exactly two node ids")

        u, v = pair
        i = index.setdefault(u, len(index))
        j = index.setdefault(v, len(index))
        if i == j and not directed:
            raise GraphError(f"Self-loop on node {u!r} in an undirected graph")

        edges.add((i, j))

    return Graph(len(index), frozenset(edges), directed, tuple(index))


def _perron_vector(transition: np.ndarray) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix by power iteration"""
    n = transition.shape[0]
    lazy = (np.eye(n) + transition) / 2
    psi = np.full(n, 1 / n)
    for _ in range(PERRON_MAX_ITERS):
        updated = psi @ lazy
        updated /= updated.sum()
        if np.max(np.abs(updated - psi)) < PERRON_TOLERANCE:
            return updated

        psi = updated

    raise DecompositionError(
        f"Perron vector did not converge in {PERRON_MAX_ITERS} iterations"
    )


def as_kind(kind: typing.Union[LaplacianKind, str]) -> LaplacianKind:
    try:
        return LaplacianKind(kind)
    except ValueError:
        raise InputError(
            f"Unknown Laplacian kind {kind!r}, expected one of "
            f"{'/'.join(k.value for k in LaplacianKind)}"
        ) from None


def laplacian(g: Graph, kind: typing.Union[LaplacianKind, str]) -> np.ndarray:
    kind = as_kind(kind)
    a = np.array(g.adjacency)

    if kind == LaplacianKind.DIRECTED_CHUNG:
        if not g.directed:
            raise GraphError("Chung's Laplacian requires a directed graph")

        if not g.is_connected():
            raise GraphError("Chung's Laplacian requires a strongly connected graph")

        if np.any(a.sum(axis=1) == 0):
            raise GraphError("Chung's Laplacian requires every node to have an out-edge")

        transition = a / a.sum(axis=1, keepdims=True)
        psi = _perron_vector(transition)
        root = np.sqrt(psi)
        sym = (root[:, None] * transition / root[None, :])
        lap = np.eye(g.n) - (sym + sym.T) / 2
        return (lap + lap.T) / 2

    if g.directed:
        raise GraphError(f"{kind.value} Laplacian requires an undirected graph")

    degrees = a.sum(axis=1)
    if kind == LaplacianKind.STANDARD:
        return np.diag(degrees) - a

    if np.any(degrees == 0):
        raise GraphError("Normalized Laplacian is undefined for isolated nodes")

    inv_root = 1 / np.sqrt(degrees)
    return np.eye(g.n) - inv_root[:, None] * a * inv_root[None, :]


def resolve_laplacian_kind(*graphs: Graph) -> LaplacianKind:
    """Laplacian variant suited to all given graphs at once"""
    directions = {g.directed for g in graphs}
    if len(directions) > 1:
        raise GraphError("Can't compare directed and undirected graphs")

    if directions == {True}:
        return LaplacianKind.DIRECTED_CHUNG

    if any(np.any(g.degrees() == 0) for g in graphs):
        return LaplacianKind.STANDARD

    return LaplacianKind.NORMALIZED


def eigendecompose(lap: np.ndarray) -> Spectrum:
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise InputError(f"Expected a square matrix, got shape {lap.shape}")

    if lap.size and np.max(np.abs(lap - lap.T)) > SYMMETRY_TOLERANCE:
        raise InputError("Matrix passed to eigendecompose is not symmetric")

    try:
        values, vectors = scipy.linalg.eigh((lap + lap.T) / 2)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise DecompositionError(f"Eigendecomposition failed: {e}") from e

    if values.size and values[0] < -EIGEN_TOLERANCE:
        logger.warning(f"Laplacian has a negative eigenvalue {values[0]:.3e}")

    values = np.where((values > -EIGEN_TOLERANCE) & (values < 0), 0.0, values)

    for col in range(vectors.shape[1]):
        magnitude = np.abs(vectors[:, col])
        pivot = int(np.argmax(magnitude >= magnitude.max() - 1e-12))
        if vectors[pivot, col] < 0:
            vectors[:, col] *= -1

    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(values, vectors)


def heat_kernel(s: Spectrum, t: float) -> HeatKernel:
    if t < 0:
        raise InputError(f"Diffusion time must be nonnegative, got {t}")

    if t == 0:
        return HeatKernel(np.eye(s.n), 0.0, s)

    phi = s.eigenvectors
    matrix = (phi * np.exp(-t * s.eigenvalues)) @ phi.T
    matrix = (matrix + matrix.T) / 2
    matrix.setflags(write=False)
    return HeatKernel(matrix, float(t), s)


def graph_heat_kernel(
    g: Graph,
    t: float,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> HeatKernel:
    """Laplacian, spectrum and kernel of `g` in one call"""
    kind = resolve_laplacian_kind(g) if kind is None else kind
    return heat_kernel(eigendecompose(laplacian(g, kind)), t)


def _check_probability(name: str, value: float):
    if not 0 <= value <= 1:
        raise InputError(f"{name} must be a probability, got {value}")


def _sample_block_edges(
    labels: np.ndarray,
    probabilities: np.ndarray,
    directed: bool,
    rng: np.random.Generator,
) -> frozenset:
    n = len(labels)
    pairwise = probabilities[labels][:, labels]
    draws = rng.random((n, n))
    hits = draws < pairwise
    np.fill_diagonal(hits, False)
    if not directed:
        hits = np.triu(hits, k=1)

    return frozenset(zip(*(axis.tolist() for axis in np.nonzero(hits))))


def generate_sbm(
    block_sizes: typing.List[int],
    p_in: float,
    p_out: typing.Union[float, np.ndarray],
    seed: int = 0,
) -> typing.Tuple[Graph, np.ndarray]:
    """
    Stochastic block model
    :param p_out: Cross-block probability or a full per-pair matrix, whose
                  diagonal is replaced by `p_in`
    :returns: Undirected graph and the block of every node
    """
    if not block_sizes or any(int(size) < 1 for size in block_sizes):
        raise InputError("Block sizes must be positive")

    _check_probability("p_in", p_in)
    k = len(block_sizes)
    probabilities = np.array(p_out, dtype=float)
    if probabilities.ndim == 0:
        probabilities = np.full((k, k), float(p_out))
    elif probabilities.shape != (k, k):
        raise InputError(f"Per-pair probabilities must be {k}x{k}")

    if np.any(probabilities < 0) or np.any(probabilities > 1):
        raise InputError("p_out entries must be probabilities")

    if np.max(np.abs(probabilities - probabilities.T)) > SYMMETRY_TOLERANCE:
        raise InputError("Per-pair probabilities of an undirected SBM must be symmetric")

    np.fill_diagonal(probabilities, p_in)

    labels = np.repeat(np.arange(k), [int(size) for size in block_sizes])
    rng = np.random.default_rng(seed)
    edges = _sample_block_edges(labels, probabilities, False, rng)
    return Graph(len(labels), edges, False), labels


def generate_gaussian_random_partition(
    n: int,
    mean_cluster: int,
    p_in: float,
    p_out: float,
    directed: bool = False,
    seed: int = 0,
) -> typing.Tuple[Graph, np.ndarray]:
    """
    Gaussian random partition graph
    Cluster sizes follow a normal law with variance `mean_cluster / 2`,
    rounded, at least 1; the last cluster takes whatever is left of `n`
    """
    if not 1 <= mean_cluster <= n:
        raise InputError(f"Need n >= mean_cluster >= 1, got n={n}, mean={mean_cluster}")

    _check_probability("p_in", p_in)
    _check_probability("p_out", p_out)

    rng = np.random.default_rng(seed)
    sizes = []
    total = 0
    while total < n:
        size = max(1, math.floor(rng.normal(mean_cluster, math.sqrt(mean_cluster / 2)) + 0.5))
        size = min(size, n - total)
        sizes.append(size)
        total += size

    k = len(sizes)
    probabilities = np.full((k, k), float(p_out))
    np.fill_diagonal(probabilities, p_in)
    labels = np.repeat(np.arange(k), sizes)
    edges = _sample_block_edges(labels, probabilities, directed, rng)
    return Graph(n, edges, directed), labels


def erdos_renyi(n: int, p: float, seed: int = 0, directed: bool = False) -> Graph:
    _check_probability("p", p)
    rng = np.random.default_rng(seed)
    edges = _sample_block_edges(np.zeros(n, dtype=int), np.array([[p]]), directed, rng)
    return Graph(n, edges, directed)


def symmetrize(g: Graph) -> Graph:
    """Undirected graph with an edge wherever `g` has one in either direction"""
    if not g.directed:
        return g

    return Graph(
        g.n,
        frozenset((i, j) for i, j in g.edges if i != j),
        False,
        g.node_ids,
    )


def add_noise_edges(g: Graph, fraction: float, seed: int = 0) -> Graph:
    """Add `round(fraction * |E|)` random new edges (fewer if the graph fills up)"""
    if fraction < 0:
        raise InputError(f"Noise fraction must be nonnegative, got {fraction}")

    rng = np.random.default_rng(seed)
    missing = 1 - np.array(g.adjacency) - np.eye(g.n)
    if not g.directed:
        missing = np.triu(missing, k=1)

    candidates = np.argwhere(missing > 0)
    count = min(len(candidates), math.floor(fraction * g.m_edges + 0.5))
    chosen = rng.choice(len(candidates), size=count, replace=False) if count else []
    extra = {tuple(int(x) for x in candidates[i]) for i in chosen}
    return Graph(g.n, g.edges | extra, g.directed, g.node_ids)


def random_sbm_dataset(
    n_graphs: int,
    n_blocks: int,
    size_range: typing.Tuple[int, int],
    p_in: float,
    p_out_max: float,
    seed: int = 0,
) -> typing.List[typing.Tuple[Graph, np.ndarray]]:
    """
    SBM graphs with uniformly random block sizes in `size_range` and
    uniformly random cross-block densities in `[0, p_out_max]`
    """
    low, high = size_range
    if not 1 <= low <= high:
        raise InputError(f"Invalid block size range {size_range}")

    dataset = []
    for index in range(n_graphs):
        rng = np.random.default_rng(utils.derive_seed(seed, index))
        sizes = rng.integers(low, high + 1, size=n_blocks).tolist()
        cross = rng.uniform(0, p_out_max, size=(n_blocks, n_blocks))
        cross = np.triu(cross, k=1)
        dataset.append(
            generate_sbm(sizes, p_in, cross + cross.T, utils.derive_seed(seed, n_graphs + index))
        )

    return dataset


def induced_subgraph(g: Graph, nodes: typing.Sequence[int]) -> Graph:
    """Subgraph on `nodes`, renumbered in the given order"""
    position = {int(node): i for i, node in enumerate(nodes)}
    if len(position) != len(nodes) or any(not 0 <= node < g.n for node in position):
        raise GraphError("Subgraph nodes must be distinct existing nodes")

    return Graph(
        len(position),
        frozenset(
            (position[i], position[j])
            for i, j in g.edges
            if i in position and j in position
        ),
        g.directed,
        tuple(g.node_ids[int(node)] for node in nodes),
    )
