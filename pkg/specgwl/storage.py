"""Readers and writers of every on-disk format"""

import csv
import glob
import json
import logging
import os
import typing

import numpy as np

from ._types import GraphError, InputError
from .graph_core import Graph, build_graph
from .measures import Coupling

logger = logging.getLogger(__name__)

DIRECTED_HEADER = "directed"
UNDIRECTED_HEADER = "undirected"


def _meaningful_lines(path: str) -> typing.Iterator[typing.Tuple[int, typing.List[str]]]:
    with open(path) as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue

            yield number, line.split()


def read_edge_list(path: str) -> Graph:
    """
    One edge per line as two whitespace-separated node ids
    `#` starts a comment line, a leading `directed` line marks a digraph
    """
    directed = False
    edges = []
    for number, tokens in _meaningful_lines(path):
        if not edges and len(tokens) == 1 and tokens[0].lower() in {
            DIRECTED_HEADER,
            UNDIRECTED_HEADER,
        }:
            directed = tokens[0].lower() == DIRECTED_HEADER
            continue

        if len(tokens) != 2:
            raise GraphError(f"{path}:{number}: expected two node ids, got {len(tokens)} fields")

        edges.append((tokens[0], tokens[1]))

    try:
        return build_graph(edges, directed)
    except GraphError as e:
        raise GraphError(f"{path}: {e}") from e


def write_edge_list(g: Graph, path: str) -> str:
    with open(path, "w") as f:
        if g.directed:
            f.write(f"{DIRECTED_HEADER}\n")

        for i, j in sorted(g.edges):
            f.write(f"{g.node_ids[i]} {g.node_ids[j]}\n")

    return path


def _pairs(path: str) -> typing.Dict[str, str]:
    pairs = {}
    for number, tokens in _meaningful_lines(path):
        if len(tokens) != 2:
            raise InputError(f"{path}:{number}: expected two fields, got {len(tokens)}")

        pairs[tokens[0]] = tokens[1]

    return pairs


def read_labels(path: str, g: typing.Optional[Graph] = None) -> typing.Union[dict, np.ndarray]:
    """
    "node_id label" lines
    :returns: Mapping of node id to label, or labels in node order when `g` is given
    """
    labels = _pairs(path)
    if g is None:
        return labels

    missing = [node for node in g.node_ids if str(node) not in labels]
    if missing:
        raise InputError(f"{path}: no label for nodes {missing[:5]}")

    names = [labels[str(node)] for node in g.node_ids]
    _, codes = np.unique(names, return_inverse=True)
    return codes


def write_labels(path: str, g: Graph, labels: typing.Sequence[int]) -> str:
    with open(path, "w") as f:
        for node, label in zip(g.node_ids, labels):
            f.write(f"{node} {int(label)}\n")

    return path


def read_correspondence(path: str, g: Graph, h: Graph) -> np.ndarray:
    """
    "node_of_g node_of_h" lines describing the true matching
    :returns: Permutation `sigma` with node `i` of `g` matched to `sigma[i]` of `h`
    """
    pairs = _pairs(path)
    index_h = {str(node): i for i, node in enumerate(h.node_ids)}
    try:
        sigma = np.array([index_h[pairs[str(node)]] for node in g.node_ids])
    except KeyError as e:
        raise InputError(f"{path}: correspondence misses node {e.args[0]}") from None

    if g.n != h.n or sorted(sigma.tolist()) != list(range(h.n)):
        raise InputError(f"{path}: correspondence is not a bijection")

    return sigma


def write_matrix_csv(
    path: str,
    matrix: np.ndarray,
    header: typing.Optional[typing.Sequence[str]] = None,
) -> str:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    header = header or [f"c{j}" for j in range(matrix.shape[1])]
    np.savetxt(path, matrix, delimiter=",", header=",".join(map(str, header)), comments="", fmt="%.17g")
    return path


def read_matrix_csv(path: str) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def write_records_csv(
    path: str,
    rows: typing.Sequence[dict],
    columns: typing.Optional[typing.Sequence[str]] = None,
) -> str:
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: "" if row.get(key) is None else row[key] for key in columns})

    return path


def read_records_csv(path: str) -> typing.List[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _default(value: typing.Any) -> typing.Any:
    if isinstance(value, np.ndarray):
        return value.tolist()

    if isinstance(value, np.generic):
        return value.item()

    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(path: str, data: typing.Any) -> str:
    with open(path, "w") as f:
        f.write(json.dumps(data, indent=2, default=_default))

    return path


def read_json(path: str) -> typing.Any:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def coupling_record(c: Coupling, threshold: float = 0.0) -> dict:
    """Sparse JSON form of a coupling: nonzeros as [i, j, value] triplets"""
    rows, cols = np.nonzero(c.matrix > threshold)
    return {
        "rows": c.shape[0],
        "cols": c.shape[1],
        "entries": [
            [int(i), int(j), float(c.matrix[i, j])] for i, j in zip(rows, cols)
        ],
        "p": np.asarray(c.p).tolist(),
        "q": np.asarray(c.q).tolist(),
    }


def coupling_from_record(record: dict) -> Coupling:
    matrix = np.zeros((record["rows"], record["cols"]))
    for i, j, value in record["entries"]:
        matrix[int(i), int(j)] = value

    return Coupling(matrix, np.asarray(record["p"]), np.asarray(record["q"]))


def read_graph_dir(path: str) -> typing.List[typing.Tuple[str, Graph, typing.Optional[np.ndarray]]]:
    """
    Every `*.edges` file of a directory with the matching `*.labels` file if present
    :returns: (name, graph, labels) sorted by name
    """
    files = sorted(glob.glob(os.path.join(path, "*.edges")))
    if not files:
        raise InputError(f"No *.edges files in {path}")

    dataset = []
    for file in files:
        name = os.path.splitext(os.path.basename(file))[0]
        g = read_edge_list(file)
        labels_path = os.path.join(path, f"{name}.labels")
        labels = read_labels(labels_path, g) if os.path.isfile(labels_path) else None
        dataset.append((name, g, labels))

    logger.debug(f"Loaded {len(dataset)} graphs from {path}")
    return dataset
