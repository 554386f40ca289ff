"""Coupling blow-up and interpolation frames for matching visualization"""

import logging
import math
import os
import typing
from dataclasses import dataclass

import jinja2
import networkx as nx
import numpy as np
import scipy.linalg

from . import utils
from ._types import InterpolationError
from .graph_core import Graph
from .measures import Coupling, as_matrix

logger = logging.getLogger(__name__)

ZERO_THRESHOLD = 1e-12
JITTER_RADIUS = 1e-3
LAYOUT_ITERATIONS = 200


@dataclass(eq=False)
class BlowupResult:
    """
    Weighted permutation form of a coupling
    Row `r` of `expanded_coupling` is a copy of node `row_map[r]`, its only
    nonzero sits in column `matching[r]`, a copy of node `col_map[matching[r]]`
    """

    expanded_coupling: np.ndarray
    row_map: np.ndarray
    col_map: np.ndarray
    matching: np.ndarray
    expanded_p: np.ndarray
    expanded_q: np.ndarray

    def aggregate(self) -> np.ndarray:
        """Sum the expanded entries back over provenance fibers"""
        m = int(self.row_map.max()) + 1 if self.row_map.size else 0
        n = int(self.col_map.max()) + 1 if self.col_map.size else 0
        return self.aggregate_to((m, n))

    def aggregate_to(self, shape: typing.Tuple[int, int]) -> np.ndarray:
        out = np.zeros(shape)
        np.add.at(
            out,
            (self.row_map[:, None], self.col_map[None, :]),
            self.expanded_coupling,
        )
        return out


@dataclass(eq=False)
class Frame:
    time: float
    positions: np.ndarray
    edges: typing.List[typing.Tuple[int, int, float]]

    def to_json(self) -> dict:
        return {
            "t": self.time,
            "nodes": self.positions.tolist(),
            "edges": [[i, j, opacity] for i, j, opacity in self.edges],
        }


def blowup_coupling(c: typing.Union[Coupling, np.ndarray]) -> BlowupResult:
    """
    Split every nonzero of the coupling into its own row and column copy
    Rows follow the row-major order of the nonzeros, columns are grouped by
    their original column
    """
    c = as_matrix(c)
    if c.ndim != 2 or not c.size or c.max() <= 0:
        raise InterpolationError("Coupling has no positive entry to blow up")

    rows, cols = np.nonzero(c > ZERO_THRESHOLD * c.max())
    values = c[rows, cols]
    order = np.lexsort((np.arange(len(cols)), cols))
    column_of = np.empty(len(cols), dtype=int)
    column_of[order] = np.arange(len(cols))

    expanded = np.zeros((len(values), len(values)))
    expanded[np.arange(len(values)), column_of] = values
    return BlowupResult(
        expanded,
        rows.astype(int),
        cols[order].astype(int),
        column_of,
        expanded.sum(axis=1),
        expanded.sum(axis=0),
    )


def _expanded_edges(g: Graph, provenance: np.ndarray) -> typing.Set[typing.Tuple[int, int]]:
    adjacency = g.adjacency
    edges = set()
    for r in range(len(provenance)):
        for s in range(len(provenance)):
            if r != s and adjacency[provenance[r], provenance[s]] > 0:
                edges.add((r, s) if g.directed else (min(r, s), max(r, s)))

    return edges


def _layout(g: Graph, seed: int) -> np.ndarray:
    positions = nx.spring_layout(g.to_networkx(), seed=seed, iterations=LAYOUT_ITERATIONS)
    return np.array([positions[node] for node in range(g.n)], dtype=float)


def _copies(layout: np.ndarray, provenance: np.ndarray) -> np.ndarray:
    """Parent positions, copies of one parent spread on a tiny circle"""
    positions = layout[provenance].copy()
    for parent in np.unique(provenance):
        members = np.flatnonzero(provenance == parent)
        if len(members) < 2:
            continue

        for index, member in enumerate(members):
            angle = 2 * math.pi * index / len(members)
            positions[member] += JITTER_RADIUS * np.array([math.cos(angle), math.sin(angle)])

    return positions


def procrustes_align(moving: np.ndarray, fixed: np.ndarray) -> np.ndarray:
    """Similarity transform (rotation, reflection, scale, shift) of `moving` onto `fixed`"""
    moving_center, fixed_center = moving.mean(axis=0), fixed.mean(axis=0)
    moving0, fixed0 = moving - moving_center, fixed - fixed_center
    norm = float(np.sum(moving0**2))
    if norm == 0:
        return moving0 + fixed_center

    rotation, singular_sum = scipy.linalg.orthogonal_procrustes(moving0, fixed0)
    return (singular_sum / norm) * moving0 @ rotation + fixed_center


def interpolation_frames(
    g: Graph,
    h: Graph,
    c: typing.Union[Coupling, np.ndarray],
    n_frames: int = 30,
    seed: int = 0,
) -> typing.List[Frame]:
    """
    Frames moving the blown-up source drawing onto the aligned target drawing
    Edges of one graph only fade out (source) or in (target) linearly
    """
    if n_frames < 2:
        raise InterpolationError(f"Need at least two frames, got {n_frames}")

    c = as_matrix(c)
    if c.shape != (g.n, h.n):
        raise InterpolationError(
            f"Coupling of shape {c.shape} doesn't match graphs of {g.n} and {h.n} nodes"
        )

    blowup = blowup_coupling(c)
    source = _copies(_layout(g, seed), blowup.row_map)
    target = _copies(_layout(h, seed), blowup.col_map)[blowup.matching]
    target = procrustes_align(target, source)

    row_of_column = np.empty_like(blowup.matching)
    row_of_column[blowup.matching] = np.arange(len(blowup.matching))
    source_edges = _expanded_edges(g, blowup.row_map)
    target_edges = {
        (int(row_of_column[i]), int(row_of_column[j]))
        for i, j in _expanded_edges(h, blowup.col_map)
    }
    if not h.directed:
        target_edges = {(min(i, j), max(i, j)) for i, j in target_edges}

    frames = []
    for index in range(n_frames):
        tau = index / (n_frames - 1)
        edges = []
        for edge in sorted(source_edges | target_edges):
            if edge in source_edges and edge in target_edges:
                opacity = 1.0
            elif edge in source_edges:
                opacity = 1.0 - tau
            else:
                opacity = tau

            if opacity > 0:
                edges.append((edge[0], edge[1], opacity))

        frames.append(Frame(tau, (1 - tau) * source + tau * target, edges))

    logger.debug(
        f"Built {n_frames} frames over {len(blowup.row_map)} blown-up nodes "
        f"({g.n}x{h.n} coupling)"
    )
    return frames


def frames_to_json(frames: typing.Sequence[Frame]) -> dict:
    return {"frames": [frame.to_json() for frame in frames]}


def _environment() -> jinja2.Environment:
    return jinja2.Environment(
        loader=jinja2.FileSystemLoader(os.path.join(utils.get_base_dir(), "templates")),
        autoescape=jinja2.select_autoescape(["svg", "j2"]),
        keep_trailing_newline=True,
    )


def render_svg(frame: Frame, size: int = 600, margin: int = 20) -> str:
    """SVG drawing of one frame"""
    positions = frame.positions
    low = positions.min(axis=0) if len(positions) else np.zeros(2)
    span = float(np.max(np.ptp(positions, axis=0))) if len(positions) else 0.0
    scale = (size - 2 * margin) / span if span > 0 else 1.0
    points = [
        (margin + (x - low[0]) * scale, margin + (y - low[1]) * scale)
        for x, y in positions
    ]
    return _environment().get_template("frame.svg.j2").render(
        size=size,
        time=frame.time,
        nodes=points,
        edges=[(points[i], points[j], opacity) for i, j, opacity in frame.edges],
    )
