"""Finite simple graphs and the l^p machinery shared by every other module."""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

# Relative tolerance for all floating point comparisons of norms.
REL_TOL = 1e-12


class Graph:
    """Immutable finite simple undirected graph on vertices ``0..n-1``.

    Edges are stored canonically as ``(u, v)`` with ``u < v`` sorted
    lexicographically, so an edge's index is stable and can key per-edge
    data such as congestion loads. Neighbours are kept in CSR form with
    sorted rows.
    """

    __slots__ = ("n", "edges", "labels", "indptr", "indices", "adj_edge", "degree", "max_degree", "_edge_index")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (), labels: Mapping[int, str] | None = None):
        n = int(n)
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be a sequence of vertex pairs")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint out of range [0, {n})")
        if np.any(arr[:, 0] == arr[:, 1]):
            bad = arr[arr[:, 0] == arr[:, 1]][0]
            raise ValueError(f"self-loop at vertex {int(bad[0])}")
        canon = np.sort(arr, axis=1)
        order = np.lexsort((canon[:, 1], canon[:, 0]))
        canon = canon[order]
        if len(canon) > 1:
            dup = np.all(canon[1:] == canon[:-1], axis=1)
            if dup.any():
                u, v = canon[1:][dup][0]
                raise ValueError(f"duplicate edge ({int(u)}, {int(v)})")
        canon.setflags(write=False)
        self.n = n
        self.edges = canon
        self.labels = dict(labels) if labels else None

        m = len(canon)
        src = np.concatenate([canon[:, 0], canon[:, 1]])
        dst = np.concatenate([canon[:, 1], canon[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        self.adj_edge = eid[order]
        self.degree = np.bincount(src, minlength=n).astype(np.int64)
        self.indptr = np.concatenate([[0], np.cumsum(self.degree)]).astype(np.int64)
        self.max_degree = int(self.degree.max()) if n else 0
        self._edge_index: dict[tuple[int, int], int] | None = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edge_id(self, u: int, v: int) -> int:
        """Index of edge ``{u, v}``; raises ``KeyError`` if absent."""
        if self._edge_index is None:
            self._edge_index = {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}
        key = (u, v) if u < v else (v, u)
        return self._edge_index[key]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=float)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def laplacian(self) -> sp.csr_matrix:
        return (sp.diags(self.degree.astype(float)) - self.adjacency()).tocsr()

    def is_connected(self) -> bool:
        return self.n > 0 and len(components_after_removal(self, ())) == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges) and self.labels == other.labels

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, max_degree={self.max_degree})"


def _check_vertices(g: Graph, s: Iterable[int]) -> np.ndarray:
    arr = np.asarray(sorted(set(int(x) for x in s)), dtype=np.int64)
    if arr.size and (arr[0] < 0 or arr[-1] >= g.n):
        bad = arr[0] if arr[0] < 0 else arr[-1]
        raise ValueError(f"vertex {int(bad)} out of range [0, {g.n})")
    return arr


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, np.ndarray]:
    """Subgraph induced on ``s``.

    Returns the new graph and the remap table ``old_index[new_index]``;
    vertices keep their relative order.
    """
    keep = _check_vertices(g, s)
    new_of = np.full(g.n, -1, dtype=np.int64)
    new_of[keep] = np.arange(len(keep))
    e = g.edges
    mask = (new_of[e[:, 0]] >= 0) & (new_of[e[:, 1]] >= 0) if len(e) else np.zeros(0, dtype=bool)
    sub_edges = new_of[e[mask]]
    labels = None
    if g.labels:
        labels = {i: g.labels[int(old)] for i, old in enumerate(keep) if int(old) in g.labels}
    return Graph(len(keep), sub_edges, labels), keep


def component_labels(g: Graph, removed: Iterable[int] = ()) -> tuple[int, np.ndarray]:
    """Label connected components of ``g - removed``; removed vertices get -1."""
    rem = _check_vertices(g, removed)
    alive = np.ones(g.n, dtype=bool)
    alive[rem] = False
    e = g.edges
    keep = alive[e[:, 0]] & alive[e[:, 1]] if len(e) else np.zeros(0, dtype=bool)
    ke = e[keep]
    a = sp.csr_matrix((np.ones(len(ke)), (ke[:, 0], ke[:, 1])), shape=(g.n, g.n))
    # csgraph traverses iteratively, so deep graphs are fine
    _, lab = connected_components(a, directed=False)
    lab = np.where(alive, lab, -1)
    uniq, dense = np.unique(lab[alive], return_inverse=True)
    out = np.full(g.n, -1, dtype=np.int64)
    out[alive] = dense
    return len(uniq), out


def components_after_removal(g: Graph, s: Iterable[int]) -> list[int]:
    """Sizes of the connected components of ``g - s``, largest first."""
    count, lab = component_labels(g, s)
    if count == 0:
        return []
    sizes = np.bincount(lab[lab >= 0], minlength=count)
    return sorted((int(x) for x in sizes), reverse=True)


def lp_norm(v: Sequence[float] | np.ndarray, p: float) -> float:
    if not p >= 1 or not np.isfinite(p):
        raise ValueError(f"p must be a finite real >= 1, got {p}")
    a = np.abs(np.asarray(v, dtype=float))
    if a.size == 0:
        return 0.0
    if p == 1:
        return float(a.sum())
    # scale by the max entry to avoid overflow for large p
    top = a.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((a / top) ** p) ** (1.0 / p))


def gradient(g: Graph, f: Sequence[float] | np.ndarray) -> np.ndarray:
    """``|f(x) - f(y)|`` for every edge, in edge-index order."""
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n,):
        raise ValueError(f"vertex function has length {f.shape[0] if f.ndim else 0}, graph has {g.n} vertices")
    return np.abs(f[g.edges[:, 0]] - f[g.edges[:, 1]])


def gradient_norm(g: Graph, f: Sequence[float] | np.ndarray, p: float) -> float:
    return lp_norm(gradient(g, f), p)


def check_norm_inequalities(v: Sequence[float] | np.ndarray, p: float, q: float) -> tuple[bool, float, float]:
    """Check ``|v|_q <= |v|_p <= r^(1/p - 1/q) |v|_q`` with ``r = len(v)``.

    Returns ``(ok, left_slack, right_slack)`` where the slacks are
    ``|v|_p - |v|_q`` and ``r^(1/p-1/q)|v|_q - |v|_p``; both are
    non-negative up to the relative tolerance ``REL_TOL``.
    """
    if not (q >= p >= 1):
        raise ValueError(f"need q >= p >= 1, got p={p}, q={q}")
    v = np.asarray(v, dtype=float)
    r = len(v)
    np_, nq = lp_norm(v, p), lp_norm(v, q)
    right = r ** (1.0 / p - 1.0 / q) * nq if r else 0.0
    left_slack = np_ - nq
    right_slack = right - np_
    scale = max(np_, nq, right, np.finfo(float).tiny)
    ok = left_slack >= -REL_TOL * scale and right_slack >= -REL_TOL * scale
    return bool(ok), float(left_slack), float(right_slack)


# ---------------------------------------------------------------- serialization


def graph_to_dict(g: Graph, extra: Mapping[str, object] | None = None) -> dict:
    out: dict = {"n": g.n, "edges": [[int(u), int(v)] for u, v in g.edges]}
    if g.labels:
        out["labels"] = {str(k): g.labels[k] for k in sorted(g.labels)}
    if extra:
        out.update(extra)
    return out


def graph_from_dict(d: Mapping) -> Graph:
    labels = {int(k): str(v) for k, v in d["labels"].items()} if d.get("labels") else None
    return Graph(int(d["n"]), [tuple(e) for e in d["edges"]], labels)


def dumps_graph(g: Graph, extra: Mapping[str, object] | None = None) -> str:
    return json.dumps(graph_to_dict(g, extra), separators=(",", ":")) + "\n"


def write_graph_json(g: Graph, path: str | Path, extra: Mapping[str, object] | None = None) -> None:
    Path(path).write_text(dumps_graph(g, extra), encoding="utf-8")


def read_graph_json(path: str | Path) -> tuple[Graph, dict]:
    """Read a graph JSON file; returns the graph and the raw document."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return graph_from_dict(doc), doc


def to_dot(g: Graph) -> str:
    lines = ["graph G {"]
    for i in range(g.n):
        if g.labels and i in g.labels:
            lines.append(f'  {i} [label="{_dot_escape(g.labels[i])}"];')
        else:
            lines.append(f"  {i};")
    for u, v in g.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


_DOT_NODE = re.compile(r'^\s*(\d+)(?:\s*\[label="((?:[^"\\]|\\.)*)"\])?;\s*$')
_DOT_EDGE = re.compile(r"^\s*(\d+)\s*--\s*(\d+);\s*$")


def from_dot(text: str) -> Graph:
    """Parse DOT in the subset emitted by :func:`to_dot`."""
    n = 0
    labels: dict[int, str] = {}
    edges = []
    for line in text.splitlines():
        if m := _DOT_EDGE.match(line):
            edges.append((int(m.group(1)), int(m.group(2))))
        elif m := _DOT_NODE.match(line):
            i = int(m.group(1))
            n = max(n, i + 1)
            if m.group(2) is not None:
                labels[i] = re.sub(r"\\(.)", r"\1", m.group(2))
    return Graph(n, edges, labels or None)


# ---------------------------------------------------------------- small families


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_connected_graph(n: int, prob: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi ``G(n, prob)`` resampled until connected."""
    if n < 1:
        raise ValueError("n must be positive")
    iu = np.triu_indices(n, 1)
    while True:
        keep = rng.random(len(iu[0])) < prob
        g = Graph(n, np.stack([iu[0][keep], iu[1][keep]], axis=1))
        if g.is_connected():
            return g
