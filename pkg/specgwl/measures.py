"""Node distributions, couplings and the hit-and-run coupling sampler"""

import dataclasses
import logging
import typing

import numpy as np
import scipy.linalg

from ._types import CouplingError, DistributionError, InputError, SamplerError
from .graph_core import Graph

logger = logging.getLogger(__name__)

MARGINAL_TOLERANCE = 1e-9
DIRECTION_TOLERANCE = 1e-12
DIRECTION_RETRIES = 32

Weights = typing.Union["NodeDistribution", np.ndarray, typing.Sequence[float]]


@dataclasses.dataclass(frozen=True, eq=False)
class NodeDistribution:
    weights: np.ndarray
    a: typing.Optional[float] = None
    b: typing.Optional[float] = None

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or not weights.size:
            raise DistributionError("Distribution must be a nonempty vector")

        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise DistributionError("Distribution must have full support")

        if abs(weights.sum() - 1) > MARGINAL_TOLERANCE:
            raise DistributionError(f"Distribution sums to {weights.sum()}, not 1")

        weights = weights.copy()
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


def as_weights(p: Weights) -> np.ndarray:
    """Plain float vector out of a distribution-like value"""
    if isinstance(p, NodeDistribution):
        return p.weights

    return np.asarray(p, dtype=float)


def uniform(n: int) -> NodeDistribution:
    return NodeDistribution(np.full(n, 1 / n), 0.0, 0.0)


def node_distribution(g: Graph, a: float = 0.0, b: float = 0.0) -> NodeDistribution:
    """
    Degree-interpolated distribution, `(deg + a) ** b` normalized
    `b = 0` gives the uniform distribution, `b = 1, a = 0` the degree one
    """
    if a < 0 or not 0 <= b <= 1:
        raise DistributionError(f"Need a >= 0 and 0 <= b <= 1, got a={a}, b={b}")

    if b == 0:
        return NodeDistribution(np.full(g.n, 1 / g.n), a, b)

    base = g.degrees() + a
    if np.any(base == 0):
        raise DistributionError(
            "Graph has an isolated node; pass a > 0 to keep full support"
        )

    weights = base**b
    return NodeDistribution(weights / weights.sum(), a, b)


@dataclasses.dataclass(frozen=True, eq=False)
class Coupling:
    matrix: np.ndarray
    p: np.ndarray
    q: np.ndarray

    @property
    def shape(self) -> typing.Tuple[int, int]:
        return self.matrix.shape

    def validate(self, tolerance: float = MARGINAL_TOLERANCE) -> "Coupling":
        """Raise `CouplingError` unless marginals and signs are respected"""
        check_coupling(self.matrix, self.p, self.q, tolerance)
        return self

    def support_size(self, threshold: float = 1e-8) -> int:
        return support_size(self.matrix, threshold)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_matrix(c: typing.Union[Coupling, np.ndarray]) -> np.ndarray:
    if isinstance(c, Coupling):
        return c.matrix

    return np.asarray(c, dtype=float)


def check_coupling(
    matrix: np.ndarray,
    p: Weights,
    q: Weights,
    tolerance: float = MARGINAL_TOLERANCE,
):
    p, q = as_weights(p), as_weights(q)
    if matrix.shape != (len(p), len(q)):
        raise CouplingError(
            f"Coupling of shape {matrix.shape} doesn't match marginals {len(p)}x{len(q)}"
        )

    if np.any(matrix < -1e-12) or np.any(matrix > 1 + 1e-12):
        raise CouplingError("Coupling entries must lie in [0, 1]")

    rows = np.max(np.abs(matrix.sum(axis=1) - p))
    cols = np.max(np.abs(matrix.sum(axis=0) - q))
    if max(rows, cols) > tolerance:
        raise CouplingError(
            f"Coupling marginals are off by {max(rows, cols):.3e}"
        )


def support_size(matrix: np.ndarray, threshold: float = 1e-8) -> int:
    """Number of entries above `threshold`"""
    return int(np.count_nonzero(as_matrix(matrix) > threshold))


def product_coupling(p: Weights, q: Weights) -> Coupling:
    p, q = as_weights(p), as_weights(q)
    return Coupling(np.outer(p, q), p, q)


def permutation_coupling(permutation: typing.Sequence[int]) -> Coupling:
    """Uniform coupling matching node `i` to `permutation[i]`"""
    n = len(permutation)
    matrix = np.zeros((n, n))
    matrix[np.arange(n), np.asarray(permutation, dtype=int)] = 1 / n
    weights = np.full(n, 1 / n)
    return Coupling(matrix, weights, weights)


def constraint_matrix(m: int, n: int) -> np.ndarray:
    """
    Marginal constraints of a row-major flattened m x n coupling
    The last column-sum row is implied by the others and is dropped
    """
    rows = np.kron(np.eye(m), np.ones((1, n)))
    cols = np.kron(np.ones((1, m)), np.eye(n))
    return np.vstack([rows, cols])[:-1]


@dataclasses.dataclass(eq=False)
class SamplerState:
    constraint_matrix: np.ndarray
    current: Coupling
    rng_seed: int
    rng: np.random.Generator = dataclasses.field(default=None, repr=False)
    basis: np.ndarray = dataclasses.field(default=None, repr=False)

    def __post_init__(self):
        if self.rng is None:
            self.rng = np.random.default_rng(self.rng_seed)

        # Orthonormal basis of the constraint row space, shared by all steps
        if self.basis is None:
            self.basis = scipy.linalg.orth(self.constraint_matrix.T)


def sampler_state(
    p: Weights,
    q: Weights,
    seed: int = 0,
    start: typing.Optional[Coupling] = None,
) -> SamplerState:
    p, q = as_weights(p), as_weights(q)
    start = product_coupling(p, q) if start is None else start
    return SamplerState(constraint_matrix(len(p), len(q)), start, seed)


def mcmc_step(state: SamplerState) -> SamplerState:
    """One hit-and-run move inside the coupling polytope"""
    current = state.current.matrix.ravel()
    basis = state.basis

    for _ in range(DIRECTION_RETRIES):
        direction = state.rng.standard_normal(current.size)
        direction -= basis @ (basis.T @ direction)
        if np.linalg.norm(direction) > DIRECTION_TOLERANCE:
            break
    else:
        raise SamplerError(
            f"No usable direction after {DIRECTION_RETRIES} draws; the polytope is a single point"
        )

    positive = direction > 0
    negative = direction < 0
    alpha = np.max(-current[positive] / direction[positive])
    beta = np.min(-current[negative] / direction[negative])
    gamma = state.rng.uniform(alpha, beta)

    updated = current + gamma * direction
    updated[(updated < 0) & (updated > -DIRECTION_TOLERANCE)] = 0.0
    if np.any(updated < 0):
        raise SamplerError("Hit-and-run step left the polytope")

    coupling = Coupling(
        updated.reshape(state.current.shape),
        state.current.p,
        state.current.q,
    )
    return dataclasses.replace(state, current=coupling)


def sample_couplings(
    p: Weights,
    q: Weights,
    n_samples: int,
    steps_between: int,
    seed: int = 0,
) -> typing.List[Coupling]:
    """
    Run one chain from the product coupling and keep every
    `steps_between`-th state, starting with step `steps_between`
    """
    if n_samples < 1 or steps_between < 1:
        raise InputError("Need n_samples >= 1 and steps_between >= 1")

    state = sampler_state(p, q, seed)
    samples = []
    for step in range(1, n_samples * steps_between + 1):
        state = mcmc_step(state)
        if step % steps_between == 0:
            samples.append(state.current)

    logger.debug(
        f"Sampled {n_samples} couplings of shape {state.current.shape} "
        f"({n_samples * steps_between} steps)"
    )
    return samples
