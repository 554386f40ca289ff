"""Gromov-Wasserstein losses, gradients and the conditional-gradient solver"""

import enum
import logging
import time
import typing
from dataclasses import dataclass, field

import numpy as np
import ot
import scipy.linalg

from . import utils
from ._types import CouplingError, DimensionError, InputError, SolverError
from .graph_core import Graph, LaplacianKind, graph_heat_kernel, resolve_laplacian_kind
from .measures import (
    Coupling,
    Weights,
    as_matrix,
    as_weights,
    check_coupling,
    node_distribution,
    sample_couplings,
)

logger = logging.getLogger(__name__)

EMD_MAX_ITERS = 1_000_000
SNAP_SLACK = 1e-12


class RepresentationKind(str, enum.Enum):
    ADJACENCY = "adjacency"
    SPECTRAL = "spectral"
    GENERIC = "generic"


@dataclass(frozen=True, eq=False)
class RepresentationPair:
    """
    Relational matrices of two measure networks
    `reduced_x` / `reduced_y` differ from `f_x` / `f_y` by multiples of the
    all-ones matrix and drive the optimizer; losses use the full matrices
    """

    f_x: np.ndarray
    f_y: np.ndarray
    kind: RepresentationKind = RepresentationKind.GENERIC
    t: typing.Optional[float] = None
    reduced_x: typing.Optional[np.ndarray] = field(default=None, repr=False)
    reduced_y: typing.Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("f_x", "f_y"):
            matrix = np.asarray(getattr(self, name), dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise DimensionError(f"{name} must be square, got shape {matrix.shape}")

            object.__setattr__(self, name, matrix)

        for name, full in (("reduced_x", self.f_x), ("reduced_y", self.f_y)):
            reduced = getattr(self, name)
            reduced = full if reduced is None else np.asarray(reduced, dtype=float)
            if reduced.shape != full.shape:
                raise DimensionError(f"{name} must have the shape of its full matrix")

            object.__setattr__(self, name, reduced)

        object.__setattr__(self, "kind", RepresentationKind(self.kind))

    @property
    def shape(self) -> typing.Tuple[int, int]:
        return self.f_x.shape[0], self.f_y.shape[0]

    @property
    def symmetric(self) -> bool:
        return bool(
            np.allclose(self.f_x, self.f_x.T, rtol=0, atol=1e-12)
            and np.allclose(self.f_y, self.f_y.T, rtol=0, atol=1e-12)
        )

    @property
    def label(self) -> str:
        if self.kind == RepresentationKind.SPECTRAL:
            return f"spectral:{self.t:g}"

        return self.kind.value

    def swapped(self) -> "RepresentationPair":
        return RepresentationPair(
            self.f_y, self.f_x, self.kind, self.t, self.reduced_y, self.reduced_x
        )


def adjacency_pair(g: Graph, h: Graph) -> RepresentationPair:
    return RepresentationPair(g.adjacency, h.adjacency, RepresentationKind.ADJACENCY)


def spectral_pair(
    g: Graph,
    h: Graph,
    t: float,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> RepresentationPair:
    """Heat kernels of both graphs under one Laplacian variant"""
    if t <= 0:
        raise InputError(f"Diffusion time must be positive, got {t}")

    kind = resolve_laplacian_kind(g, h) if kind is None else kind
    kx = graph_heat_kernel(g, t, kind)
    ky = graph_heat_kernel(h, t, kind)
    return RepresentationPair(
        kx.matrix,
        ky.matrix,
        RepresentationKind.SPECTRAL,
        float(t),
        kx.reduced,
        ky.reduced,
    )


def representation_pair(
    g: Graph,
    h: Graph,
    loss_kind: str,
    t: typing.Optional[float] = None,
    laplacian_kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> RepresentationPair:
    """Pair by loss name: `adjacency`, `spectral` (needs `t`) or `spectral:<t>`"""
    name, _, suffix = str(loss_kind).partition(":")
    if name == RepresentationKind.ADJACENCY.value:
        return adjacency_pair(g, h)

    if name == RepresentationKind.SPECTRAL.value:
        t = float(suffix) if suffix else t
        if t is None:
            raise InputError("Spectral loss needs a diffusion time")

        return spectral_pair(g, h, t, laplacian_kind)

    raise InputError(f"Unknown loss kind {loss_kind!r}")


@dataclass
class SolverOptions:
    max_iters: int = 1000
    rel_tol: float = 1e-9
    init: typing.Optional[typing.Union[Coupling, np.ndarray]] = None
    vertex_snap: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise InputError(f"max_iters must be at least 1, got {self.max_iters}")

        if not self.rel_tol > 0:
            raise InputError(f"rel_tol must be positive, got {self.rel_tol}")

    def with_init(self, init: typing.Optional[typing.Union[Coupling, np.ndarray]]) -> "SolverOptions":
        return SolverOptions(self.max_iters, self.rel_tol, init, self.vertex_snap)


@dataclass(eq=False)
class SolveResult:
    coupling: Coupling
    loss: float
    distance: float
    iterations: int
    converged: bool
    wall_time: float
    trace: typing.List[float] = field(default_factory=list, repr=False)

    def to_json(self, coupling_csv_path: typing.Optional[str] = None) -> dict:
        return {
            "loss": self.loss,
            "distance": self.distance,
            "iterations": self.iterations,
            "converged": self.converged,
            "wall_time_s": self.wall_time,
            "coupling_csv_path": coupling_csv_path,
        }


def _check_dims(rep: RepresentationPair, c: np.ndarray):
    if c.shape != rep.shape:
        raise DimensionError(
            f"Coupling of shape {c.shape} doesn't match representations {rep.shape}"
        )


def _cross(f_x: np.ndarray, f_y: np.ndarray, c: np.ndarray) -> float:
    return float(np.sum((f_x @ c) * (c @ f_y)))


def _constant(f_x: np.ndarray, f_y: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    return float(p @ (f_x**2) @ p + q @ (f_y**2) @ q)


def gw_loss(rep: RepresentationPair, c: typing.Union[Coupling, np.ndarray]) -> float:
    """
    Sum over i, k, j, l of (F_X[i, k] - F_Y[j, l]) ** 2 * C[i, j] * C[k, l]
    Marginals are read off `c` itself
    """
    c = as_matrix(c)
    _check_dims(rep, c)
    return _constant(rep.f_x, rep.f_y, c.sum(axis=1), c.sum(axis=0)) - 2 * _cross(
        rep.f_x, rep.f_y, c
    )


def gw_inner(rep: RepresentationPair, c: typing.Union[Coupling, np.ndarray]) -> float:
    """Frobenius product of F_X C and C F_Y"""
    c = as_matrix(c)
    _check_dims(rep, c)
    return _cross(rep.f_x, rep.f_y, c)


def psd_factor(matrix: np.ndarray) -> np.ndarray:
    """U with U.T @ U == matrix for a symmetric positive semidefinite matrix"""
    values, vectors = scipy.linalg.eigh((matrix + matrix.T) / 2)
    return np.sqrt(np.clip(values, 0, None))[:, None] * vectors.T


def gw_inner_factored(rep: RepresentationPair, c: typing.Union[Coupling, np.ndarray]) -> float:
    """`gw_inner` as the squared norm of U_X C U_Y^T for semidefinite representations"""
    c = as_matrix(c)
    _check_dims(rep, c)
    if rep.kind != RepresentationKind.SPECTRAL:
        raise InputError("Factored inner product needs heat kernel representations")

    return float(np.sum((psd_factor(rep.f_x) @ c @ psd_factor(rep.f_y).T) ** 2))


def _cross_gradient(
    f_x: np.ndarray,
    f_y: np.ndarray,
    c: np.ndarray,
    symmetric: bool,
) -> np.ndarray:
    if symmetric:
        return -4 * (f_x @ c @ f_y)

    return -2 * (f_x.T @ c @ f_y + f_x @ c @ f_y.T)


def gw_gradient(
    rep: RepresentationPair,
    c: typing.Union[Coupling, np.ndarray],
    symmetric: typing.Optional[bool] = None,
) -> np.ndarray:
    """
    Gradient of `gw_loss` with respect to the coupling entries
    :param symmetric: Force the symmetric (`True`) or general (`False`)
                      formula; detected from the representations by default
    """
    c = as_matrix(c)
    _check_dims(rep, c)
    symmetric = rep.symmetric if symmetric is None else symmetric
    p, q = c.sum(axis=1), c.sum(axis=0)
    sq_x, sq_y = rep.f_x**2, rep.f_y**2
    constant = ((sq_x + sq_x.T) @ p)[:, None] + ((sq_y + sq_y.T) @ q)[None, :]
    return constant + _cross_gradient(rep.f_x, rep.f_y, c, symmetric)


def _check_marginals(p: np.ndarray, q: np.ndarray):
    if abs(p.sum() - q.sum()) > 1e-9:
        raise CouplingError(f"Marginals have different masses: {p.sum()} vs {q.sum()}")

    if np.any(p < 0) or np.any(q < 0):
        raise CouplingError("Marginals must be nonnegative")


def solve_linear_ot(cost: np.ndarray, p: Weights, q: Weights) -> Coupling:
    """Vertex of the transportation polytope minimizing <cost, C>"""
    p = np.ascontiguousarray(as_weights(p), dtype=np.float64)
    q = np.ascontiguousarray(as_weights(q), dtype=np.float64)
    cost = np.asarray(cost, dtype=np.float64)
    if cost.shape != (len(p), len(q)):
        raise DimensionError(f"Cost of shape {cost.shape} doesn't match marginals")

    if not np.all(np.isfinite(cost)):
        raise SolverError("Linear transport cost has non-finite entries")

    _check_marginals(p, q)

    # Network simplex tolerances are absolute, so the cost is brought to unit range
    spread = np.ptp(cost)
    scaled = (cost - cost.min()) / spread if spread > 0 else np.zeros_like(cost)
    plan, log = ot.emd(p, q, np.ascontiguousarray(scaled), numItermax=EMD_MAX_ITERS, log=True)
    if log.get("warning"):
        raise SolverError(f"Exact transport solver failed: {log['warning']}")

    plan = np.clip(np.asarray(plan, dtype=float), 0, None)
    return Coupling(plan, p, q)


def minimize_gw(
    rep: RepresentationPair,
    p: Weights,
    q: Weights,
    opts: typing.Optional[SolverOptions] = None,
) -> SolveResult:
    """
    Conditional-gradient descent on the GW loss over couplings of p and q
    Every step solves an exact linear transport problem on the gradient and
    moves to the best point of the segment towards its vertex
    """
    opts = opts or SolverOptions()
    started = time.perf_counter()
    p, q = as_weights(p), as_weights(q)
    if rep.shape != (len(p), len(q)):
        raise DimensionError(
            f"Representations {rep.shape} don't match marginals {len(p)}x{len(q)}"
        )

    _check_marginals(p, q)
    if opts.init is None:
        c = np.outer(p, q)
    else:
        c = np.array(as_matrix(opts.init), dtype=float)
        check_coupling(c, p, q)

    r_x, r_y = rep.reduced_x, rep.reduced_y
    symmetric = rep.symmetric

    # Only the coupling-dependent part h = -2 <R_X C, C R_Y> is tracked,
    # the rest of the loss is fixed by the marginals
    h = -2 * _cross(r_x, r_y, c)
    offset = gw_loss(rep, c) - h
    trace = [offset + h]
    converged = False
    iterations = 0

    for iterations in range(1, opts.max_iters + 1):
        gradient = _cross_gradient(r_x, r_y, c, symmetric)
        vertex = solve_linear_ot(gradient, p, q).matrix
        direction = vertex - c
        slope = float(np.sum(gradient * direction))
        curvature = -2 * _cross(r_x, r_y, direction)
        if curvature > 0:
            gamma = min(max(-slope / (2 * curvature), 0.0), 1.0)
        else:
            gamma = 1.0 if curvature + slope < 0 else 0.0

        if gamma == 0:
            converged = True
            break

        c = c + gamma * direction
        updated = -2 * _cross(r_x, r_y, c)
        if not np.isfinite(updated):
            raise SolverError(f"Loss became non-finite at iteration {iterations}")

        decrease = h - updated
        h = updated
        trace.append(offset + h)
        if decrease <= opts.rel_tol * max(abs(h), np.finfo(float).tiny):
            converged = True
            break

    if not converged:
        logger.warning(
            f"Solver stopped after {opts.max_iters} iterations without converging"
        )

    if opts.vertex_snap:
        vertex = solve_linear_ot(_cross_gradient(r_x, r_y, c, symmetric), p, q).matrix
        snapped = -2 * _cross(r_x, r_y, vertex)
        if snapped <= h + opts.rel_tol * abs(h) + SNAP_SLACK:
            c, h = vertex, snapped
        else:
            logger.debug(f"Vertex snap rejected, it raises the loss by {snapped - h:.3e}")

    loss = gw_loss(rep, c)
    if not np.isfinite(loss):
        raise SolverError("Final loss is not finite")

    loss = max(loss, 0.0)
    wall_time = time.perf_counter() - started
    logger.debug(
        f"{rep.label} solve {rep.shape[0]}x{rep.shape[1]}: loss={loss:.6e} "
        f"iterations={iterations} converged={converged} in {wall_time:.3f}s"
    )
    return SolveResult(
        Coupling(c, p, q),
        loss,
        float(np.sqrt(loss)),
        iterations,
        converged,
        wall_time,
        trace,
    )


def spec_gw_distance(
    g: Graph,
    p: Weights,
    h: Graph,
    q: Weights,
    t: float,
    opts: typing.Optional[SolverOptions] = None,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> SolveResult:
    """Spectral GW distance between two measure graphs at diffusion time `t`"""
    return minimize_gw(spectral_pair(g, h, t, kind), p, q, opts)


def coupling_scale_sweep(
    g: Graph,
    h: Graph,
    t_values: typing.Sequence[float],
    p: typing.Optional[Weights] = None,
    q: typing.Optional[Weights] = None,
    opts: typing.Optional[SolverOptions] = None,
    threads: int = 1,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> typing.List[SolveResult]:
    """One spectral solve per diffusion time, in the order of `t_values`"""
    p = node_distribution(g) if p is None else p
    q = node_distribution(h) if q is None else q
    return utils.fan_out(
        lambda t: spec_gw_distance(g, p, h, q, t, opts, kind),
        t_values,
        threads,
    )


@dataclass
class LandscapeRecord:
    loss_kind: str
    min_loss: float
    max_loss: float
    worst_error: float
    product_error: float
    mean_wall_time: float
    n_inits: int

    def to_row(self) -> dict:
        return dict(self.__dict__)


def _relative_error(value: float, minimum: float, spread: float) -> float:
    if abs(minimum) <= 1e-12:
        return 0.0 if spread <= 1e-12 else float("inf")

    return (value - minimum) / minimum


def landscape_experiment(
    g: Graph,
    h: Graph,
    t_values: typing.Sequence[float],
    n_inits: int,
    seed: int = 0,
    opts: typing.Optional[SolverOptions] = None,
    dist_params: typing.Tuple[float, float] = (0.0, 0.0),
    steps_between: int = 1000,
    threads: int = 1,
    kind: typing.Optional[typing.Union[LaplacianKind, str]] = None,
) -> typing.List[LandscapeRecord]:
    """
    Descend the adjacency loss and every spectral loss from `n_inits`
    sampled couplings and from the product coupling
    Worst error is `(max - min) / min` over the sampled starts
    """
    if n_inits < 1:
        raise InputError("Need at least one initialization")

    opts = opts or SolverOptions()
    a, b = dist_params
    p, q = node_distribution(g, a, b), node_distribution(h, a, b)
    inits = sample_couplings(p, q, n_inits, steps_between, seed)
    reps = [adjacency_pair(g, h)] + [spectral_pair(g, h, t, kind) for t in t_values]

    tasks = [(rep, init) for rep in reps for init in [None] + inits]
    results = utils.fan_out(
        lambda task: minimize_gw(task[0], p, q, opts.with_init(task[1])),
        tasks,
        threads,
    )

    records = []
    per_rep = n_inits + 1
    for index, rep in enumerate(reps):
        chunk = results[index * per_rep : (index + 1) * per_rep]
        product, sampled = chunk[0], chunk[1:]
        losses = np.array([result.loss for result in sampled])
        minimum, maximum = float(losses.min()), float(losses.max())
        spread = maximum - minimum
        records.append(
            LandscapeRecord(
                rep.label,
                minimum,
                maximum,
                _relative_error(maximum, minimum, spread),
                _relative_error(product.loss, minimum, abs(product.loss - minimum)),
                float(np.mean([result.wall_time for result in sampled])),
                n_inits,
            )
        )
        logger.info(
            f"{rep.label}: min loss {minimum:.6e}, worst error {records[-1].worst_error:.4%}"
        )

    return records
