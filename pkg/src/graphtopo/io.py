"""File interfaces: CSV matrices/vectors, graph JSON, atomic writes.

CSV is comma-separated, one row per line, no header. Numbers are written with
Python's repr (shortest round-trip form), so golden files are stable across
platforms. Graph JSON is {"n": int, "edges": [[i, j, w], ...]} with 0-based
vertex indices.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import DirectedGraph, Graph

__all__ = [
    "atomic_write_text",
    "format_csv",
    "write_matrix_csv",
    "write_vector_csv",
    "read_matrix_csv",
    "read_vector_csv",
    "graph_to_json",
    "graph_from_json",
    "directed_graph_from_json",
    "write_graph_json",
    "read_graph_json",
    "read_directed_graph_json",
]


def atomic_write_text(path, text: str) -> None:
    """Write text to path via a temp file + rename in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(m) -> str:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    lines = [",".join(repr(float(v)) for v in row) for row in m]
    return "\n".join(lines) + "\n"


def write_matrix_csv(path, m) -> None:
    atomic_write_text(path, format_csv(m))


def write_vector_csv(path, v) -> None:
    """Vectors are written one value per line."""
    v = np.asarray(v, dtype=float).reshape(-1, 1)
    atomic_write_text(path, format_csv(v))


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged CSV rows")
    return np.array(rows, dtype=float)


def read_vector_csv(path) -> np.ndarray:
    m = read_matrix_csv(path)
    if 1 not in m.shape and m.ndim == 2:
        raise ValueError(f"{path}: expected a vector, got shape {m.shape}")
    return m.reshape(-1)


def graph_to_json(g: Graph) -> str:
    edges = []
    for i in range(g.n):
        for j in range(i + 1, g.n):
            w = g.w[i, j]
            if w > 0:
                edges.append([i, j, float(w)])
    return json.dumps({"n": g.n, "edges": edges}, indent=None, separators=(",", ":"))


def _weights_from_json(text: str, directed: bool) -> np.ndarray:
    data = json.loads(text)
    n = int(data["n"])
    w = np.zeros((n, n))
    for entry in data.get("edges", []):
        i, j, weight = int(entry[0]), int(entry[1]), float(entry[2])
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
        w[i, j] = weight
        if not directed:
            w[j, i] = weight
    return w


def graph_from_json(text: str) -> Graph:
    return Graph.from_weights(_weights_from_json(text, directed=False))


def directed_graph_from_json(text: str) -> DirectedGraph:
    """Edges are read as ordered pairs [from, to, w]."""
    return DirectedGraph.from_weights(_weights_from_json(text, directed=True))


def write_graph_json(path, g: Graph) -> None:
    atomic_write_text(path, graph_to_json(g) + "\n")


def read_graph_json(path) -> Graph:
    return graph_from_json(Path(path).read_text())


def read_directed_graph_json(path) -> DirectedGraph:
    return directed_graph_from_json(Path(path).read_text())
