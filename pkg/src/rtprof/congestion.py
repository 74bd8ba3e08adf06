"""Canonical path systems, edge congestion, and path-counting lower bounds on h^p.

Given a path ``gamma(w0, w1)`` for every ordered vertex pair, let ``M_e`` be
the number of pairs whose path uses edge ``e``. Then

    h^1(G) >= n / max_e M_e
    h^p(G) >= n^(1/p) / max_{w0,w1} (sum_{e in gamma} M_e^(1/(p-1)))^((p-1)/p)   (p > 1)

Paths are walks and may traverse an edge twice (the two vertical legs of
a Y_k route share edges when both anchors hang off the same branch). As in
the lemma, ``M_e`` counts pairs whose path *contains* ``e`` and the path
sums run over the path's distinct edges. The edge set of a walk from w0 to
w1 contains a simple w0-w1 path, so both inequalities stay valid.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .budget import Budget
from .graph import Graph
from .roundtree import YkGraph


# ---------------------------------------------------------------- colouring


@dataclass
class Coloring:
    """Pair colouring ``(label(x) * m + label(y)) mod T`` with labels ``pos mod m``."""

    T: int
    m: int
    labels: np.ndarray

    def color(self, x: int, y: int) -> int:
        return int((self.labels[x] * self.m + self.labels[y]) % self.T)

    def balance(self) -> dict:
        """Largest colour class within a row ``{x} x Y`` and within a column ``Y x {y}``."""
        cnt = np.bincount(self.labels, minlength=self.m)
        ls = np.arange(self.m)
        row = np.zeros((self.m, self.T), dtype=np.int64)
        col = np.zeros((self.m, self.T), dtype=np.int64)
        for l0 in range(self.m):
            np.add.at(row[l0], (l0 * self.m + ls) % self.T, cnt)
            np.add.at(col[l0], (ls * self.m + l0) % self.T, cnt)
        present = cnt > 0
        return {"max_row_class": int(row[present].max()), "max_col_class": int(col[present].max())}


def balanced_label_count(T: int) -> int:
    """Smallest ``m >= ceil(sqrt(T))`` with ``T | m^2``.

    With ``T | m^2`` the ``m^2`` label pairs cover every colour equally
    often; plain ``ceil(sqrt(T))`` can fold two label pairs onto one colour
    and double the load on that branch (T = 8 gives m = 3, 9 pairs on 8
    colours). Both choices agree whenever T is a perfect square.
    """
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    m = math.isqrt(T - 1) + 1 if T > 1 else 1
    while (m * m) % T:
        m += 1
    return m


def build_coloring(yk: YkGraph, m: int | None = None) -> Coloring:
    """Colouring of Y_k pairs; ``m`` defaults to :func:`balanced_label_count`."""
    m = balanced_label_count(yk.T) if m is None else m
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    return Coloring(yk.T, m, (yk.pos % m).astype(np.int64))


# ---------------------------------------------------------------- path systems


class PathSystem:
    """A path (as an edge-id walk) for every ordered vertex pair of ``graph``."""

    def __init__(self, graph: Graph, path_fn=None):
        self.graph = graph
        self._path_fn = path_fn

    @property
    def n(self) -> int:
        return self.graph.n

    def path(self, w0: int, w1: int) -> list[int]:
        if w0 == w1:
            return []
        return list(self._path_fn(w0, w1))


class ShortestPathSystem(PathSystem):
    """BFS shortest paths; ties broken toward the smallest-index parent."""

    def __init__(self, graph: Graph):
        super().__init__(graph)
        self._pred: dict[int, np.ndarray] = {}

    def _tree(self, root: int) -> np.ndarray:
        if root not in self._pred:
            self._pred[root] = bfs_parents(self.graph, root)
        return self._pred[root]

    def path(self, w0: int, w1: int) -> list[int]:
        if w0 == w1:
            return []
        pred = self._tree(w1)  # walk from w0 toward w1 along the tree rooted at w1
        if pred[w0] < 0:
            raise ValueError(f"no path between {w0} and {w1}")
        out, x = [], w0
        while x != w1:
            y = int(pred[x])
            out.append(self.graph.edge_id(x, y))
            x = y
        return out


class TreePathSystem(PathSystem):
    """Paths through a single BFS spanning tree rooted at ``root``."""

    def __init__(self, graph: Graph, root: int = 0):
        super().__init__(graph)
        self.pred = bfs_parents(graph, root)
        self.depth = np.zeros(graph.n, dtype=np.int64)
        for x in _bfs_order(graph, root):
            if self.pred[x] >= 0 and x != root:
                self.depth[x] = self.depth[self.pred[x]] + 1

    def path(self, w0: int, w1: int) -> list[int]:
        if w0 == w1:
            return []
        up, down = [], []
        a, b = w0, w1
        while a != b:
            if self.depth[a] >= self.depth[b]:
                up.append(self.graph.edge_id(a, int(self.pred[a])))
                a = int(self.pred[a])
            else:
                down.append(self.graph.edge_id(b, int(self.pred[b])))
                b = int(self.pred[b])
        return up + down[::-1]


def _bfs_order(g: Graph, root: int) -> list[int]:
    seen = np.zeros(g.n, dtype=bool)
    seen[root] = True
    order, queue = [], deque([root])
    while queue:
        x = queue.popleft()
        order.append(x)
        for y in g.neighbors(x):
            if not seen[y]:
                seen[y] = True
                queue.append(int(y))
    return order


def bfs_parents(g: Graph, root: int) -> np.ndarray:
    pred = np.full(g.n, -1, dtype=np.int64)
    seen = np.zeros(g.n, dtype=bool)
    seen[root] = True
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if not seen[y]:
                seen[y] = True
                pred[y] = x
                queue.append(int(y))
    pred[root] = root
    return pred


class YkPathSystem(PathSystem):
    """Canonical routes in Y_k through the base path Y_0.

    ``route(w0, w1)``: with ``c`` the colour of the pair and ``b_c`` the c-th
    word of Y_0, move horizontally to the nearest vertex of w0's slice lying
    above ``b_c``, descend to ``(b_c, 0^t)``, climb to the corresponding
    vertex of w1's slice and move horizontally to ``w1``.
    """

    def __init__(self, yk: YkGraph, coloring: Coloring | None = None):
        super().__init__(yk.graph)
        self.yk = yk
        self.coloring = coloring or build_coloring(yk)
        T = yk.T
        self.block_lo, self.block_hi = [], []
        for s in yk.slices:
            a = yk.anc0[s.vertices]
            lo = np.searchsorted(a, np.arange(T), side="left")
            hi = np.searchsorted(a, np.arange(T), side="right") - 1
            if np.any(hi < lo):
                raise ValueError("a slice does not lie above every base word")
            self.block_lo.append(lo)
            self.block_hi.append(hi)

    def anchor(self, w: int, c: int) -> int:
        """Position in w's slice of the nearest vertex above base word ``c``."""
        s = int(self.yk.slice_of[w])
        return int(np.clip(self.yk.pos[w], self.block_lo[s][c], self.block_hi[s][c]))

    def half_path(self, w: int, c: int) -> list[int]:
        yk = self.yk
        s = yk.slices[int(yk.slice_of[w])]
        p0, p1 = int(yk.pos[w]), self.anchor(w, c)
        out = [int(e) for e in s.edges[p0:p1]] if p1 >= p0 else [int(e) for e in s.edges[p1:p0][::-1]]
        x = int(s.vertices[p1])
        while yk.parent[x] >= 0:
            out.append(int(yk.parent_edge[x]))
            x = int(yk.parent[x])
        return out

    def path(self, w0: int, w1: int) -> list[int]:
        if not (0 <= w0 < self.n and 0 <= w1 < self.n):
            raise ValueError(f"vertex outside Y_k: {w0}, {w1}")
        if w0 == w1:
            return []
        c = self.coloring.color(w0, w1)
        return self.half_path(w0, c) + self.half_path(w1, c)[::-1]


def route(yk: YkGraph, coloring: Coloring, w0: int, w1: int) -> list[int]:
    return YkPathSystem(yk, coloring).path(w0, w1)


def walk_vertices(g: Graph, start: int, edge_walk: list[int]) -> list[int]:
    """Vertex sequence of a walk given as edge ids; raises if the walk is broken."""
    seq = [start]
    for e in edge_walk:
        a, b = (int(x) for x in g.edges[e])
        if seq[-1] == a:
            seq.append(b)
        elif seq[-1] == b:
            seq.append(a)
        else:
            raise ValueError(f"edge {e} does not continue the walk at vertex {seq[-1]}")
    return seq


# ---------------------------------------------------------------- loads


def loads_by_enumeration(system: PathSystem, budget: Budget | None = None) -> np.ndarray:
    """Exact loads by routing every ordered pair and counting traversals."""
    n = system.n
    (budget or Budget()).check_work(float(n) * n * max(1, system.graph.max_degree), "pair enumeration")
    loads = np.zeros(system.graph.m, dtype=np.int64)
    for w0 in range(n):
        for w1 in range(n):
            for e in set(system.path(w0, w1)):
                loads[e] += 1
    return loads


def loads_sampled(system: PathSystem, samples: int, seed: int = 0) -> np.ndarray:
    """Unbiased load estimate from uniform random ordered pairs (not a certificate)."""
    rng = np.random.default_rng(seed)
    n = system.n
    acc = np.zeros(system.graph.m, dtype=float)
    pairs = rng.integers(0, n, size=(samples, 2))
    for w0, w1 in pairs:
        for e in set(system.path(int(w0), int(w1))):
            acc[e] += 1
    return acc * (n * n / samples)


def _pair_counts(col: Coloring) -> tuple[np.ndarray, np.ndarray]:
    """``src[l, c]`` = #y with colour(x, y) = c for label(x) = l; ``dst`` likewise for the second slot."""
    cnt = np.bincount(col.labels, minlength=col.m)
    ls = np.arange(col.m)
    src = np.zeros((col.m, col.T), dtype=np.int64)
    dst = np.zeros((col.m, col.T), dtype=np.int64)
    for l0 in range(col.m):
        np.add.at(src[l0], (l0 * col.m + ls) % col.T, cnt)
        np.add.at(dst[l0], (ls * col.m + l0) % col.T, cnt)
    return src, dst


def _anchor_matrix(ps: YkPathSystem, s_idx: int) -> np.ndarray:
    s = ps.yk.slices[s_idx]
    positions = np.arange(len(s))
    return np.clip(positions[:, None], ps.block_lo[s_idx][None, :], ps.block_hi[s_idx][None, :])


def _color_onehot(col: Coloring) -> np.ndarray:
    """``(m*m) x T`` indicator of ``colour(l0, l1) = c`` over flattened label pairs."""
    ls = np.arange(col.m)
    c = ((ls[:, None] * col.m + ls[None, :]) % col.T).ravel()
    out = np.zeros((col.m * col.m, col.T))
    out[np.arange(col.m * col.m), c] = 1.0
    return out


def _same_color_pairs(counts: np.ndarray, col: Coloring, onehot: np.ndarray) -> np.ndarray:
    """Ordered pairs ``w0 != w1`` of each colour drawn from a multiset of labels.

    ``counts`` is ``N x m`` (label counts per row); the result is ``N x T``.
    """
    counts = counts.astype(float)
    outer = (counts[:, :, None] * counts[:, None, :]).reshape(len(counts), -1)
    diag = (np.arange(col.m) * (col.m + 1)) % col.T
    same = np.zeros((len(counts), col.T))
    for l in range(col.m):
        same[:, diag[l]] += counts[:, l]
    return outer @ onehot - same


def compute_congestion(yk: YkGraph, coloring: Coloring | None = None, budget: Budget | None = None) -> np.ndarray:
    """Exact per-edge loads of the canonical Y_k routes over all ordered pairs.

    A route splits into a half path from ``w0`` to ``(b_c, 0^t)`` and the
    reverse of the half path from ``w1``; both depend only on one endpoint
    and the colour ``c``. Traversals are accumulated per ``(vertex, colour)``
    with the number of pairs realising it. The two halves share edges in
    two places only: the vertical chain below the common ancestor of the
    two anchors, and the overlap of two same-side horizontal segments in a
    shared slice. Pairs covering an edge twice are counted and removed, so
    each pair contributes at most once per edge, matching
    :func:`loads_by_enumeration`.
    """
    ps = YkPathSystem(yk, coloring)
    col = ps.coloring
    n, T, m = yk.n, yk.T, col.m
    longest = max(len(s) for s in yk.slices) + int(yk.depth.max()) - yk.t
    (budget or Budget()).check_work(float(n) * T * (longest + m * m), "congestion count")

    src, dst = _pair_counts(col)
    weight = src[col.labels] + dst[col.labels]
    diag = (col.labels * (m + 1)) % T
    weight[np.arange(n), diag] -= 2  # w0 == w1 has the empty path
    onehot = _color_onehot(col)
    eye = np.eye(m, dtype=np.int64)

    loads = np.zeros(yk.graph.m, dtype=np.int64)
    acc = np.zeros(n, dtype=np.int64)
    anchored = np.zeros((n, m), dtype=np.int64)  # anchored[v, l]: #(w, c) with label l anchored at v
    for si, s in enumerate(yk.slices):
        L = len(s)
        anchors = _anchor_matrix(ps, si)
        w = weight[s.vertices]
        a = np.minimum(anchors, np.arange(L)[:, None]).ravel()
        b = np.maximum(anchors, np.arange(L)[:, None]).ravel()
        diff = np.bincount(a, weights=w.ravel(), minlength=L + 1) - np.bincount(b, weights=w.ravel(), minlength=L + 1)
        if L > 1:
            loads[s.edges] += np.rint(np.cumsum(diff)[: L - 1]).astype(np.int64)
            loads[s.edges] -= _horizontal_overlap(ps, si, col, onehot, eye)
        lab = np.repeat(col.labels[s.vertices], T)
        np.add.at(anchored, (s.vertices[anchors.ravel()], lab), 1)
        acc += np.rint(np.bincount(s.vertices[anchors.ravel()], weights=w.ravel(), minlength=n)).astype(np.int64)
    _push_down(yk, acc, loads)
    _remove_vertical_overlap(yk, col, anchored, onehot, loads)
    return loads


def _horizontal_overlap(ps: YkPathSystem, si: int, col: Coloring, onehot: np.ndarray, eye: np.ndarray) -> np.ndarray:
    """Per slice edge: pairs whose two horizontal segments both cover it."""
    s = ps.yk.slices[si]
    L = len(s)
    onehot_lab = eye[col.labels[s.vertices]]
    prefix = np.vstack([np.zeros((1, col.m), dtype=np.int64), np.cumsum(onehot_lab, axis=0)])
    suffix = prefix[-1] - prefix
    j = np.arange(L - 1)
    # edge j joins positions j, j + 1; left of block c it is covered by positions <= j,
    # right of block c by positions >= j + 1
    pre_pairs = _same_color_pairs(prefix[j + 1], col, onehot)
    suf_pairs = _same_color_pairs(suffix[j + 1], col, onehot)
    left = j[:, None] < ps.block_lo[si][None, :]
    right = j[:, None] >= ps.block_hi[si][None, :]
    out = np.where(left, pre_pairs, 0.0) + np.where(right, suf_pairs, 0.0)
    return np.rint(out.sum(axis=1)).astype(np.int64)


def _remove_vertical_overlap(yk: YkGraph, col: Coloring, anchored: np.ndarray, onehot: np.ndarray, loads: np.ndarray) -> None:
    """A vertical edge above x is used twice by pairs whose anchors both lie below x."""
    depth = yk.depth
    below = anchored.copy()
    for d in range(int(depth.max()), yk.t, -1):
        nodes = np.flatnonzero((depth == d) & (yk.parent >= 0))
        if nodes.size == 0:
            continue
        pairs = _same_color_pairs(below[nodes], col, onehot)
        loads[yk.parent_edge[nodes]] -= np.rint(pairs[np.arange(nodes.size), yk.anc0[nodes]]).astype(np.int64)
        np.add.at(below, yk.parent[nodes], below[nodes])


def _push_down(yk: YkGraph, acc: np.ndarray, loads: np.ndarray) -> None:
    """Add each vertex's descending traffic to its parent edge, deepest level first."""
    depth = yk.depth
    total = acc.copy()
    for d in range(int(depth.max()), yk.t, -1):
        nodes = np.flatnonzero((depth == d) & (yk.parent >= 0))
        loads[yk.parent_edge[nodes]] += total[nodes]
        np.add.at(total, yk.parent[nodes], total[nodes])


# ---------------------------------------------------------------- path sums


def max_path_sum_by_enumeration(system: PathSystem, loads: np.ndarray, p: float) -> tuple[float, tuple[int, int]]:
    """``max_{w0,w1} sum_{e in gamma} M_e^(1/(p-1))`` by routing every pair."""
    g_e = _edge_weights(loads, p)
    best, arg = -1.0, (0, 0)
    for w0 in range(system.n):
        for w1 in range(system.n):
            val = float(sum(g_e[e] for e in set(system.path(w0, w1))))
            if val > best:
                best, arg = val, (w0, w1)
    return best, arg


def _edge_weights(loads: np.ndarray, p: float) -> np.ndarray:
    if p <= 1:
        raise ValueError("path sums are only defined for p > 1")
    return np.asarray(loads, dtype=float) ** (1.0 / (p - 1))


def yk_max_path_sum(
    ps: YkPathSystem, loads: np.ndarray, p: float, budget: Budget | None = None
) -> tuple[float, tuple[int, int]]:
    """Same maximum as :func:`max_path_sum_by_enumeration`, vectorised over w1.

    The edge set of a route is the union of two half paths, so its sum is
    ``S(w0, c) + S(w1, c)`` minus the shared vertical chain below the
    anchors' common ancestor and minus any shared horizontal stretch.
    """
    yk, col = ps.yk, ps.coloring
    n, T = yk.n, yk.T
    g_e = _edge_weights(loads, p)
    depth = yk.depth
    top = int(depth.max())
    (budget or Budget()).check_work(float(n) * n * (top - yk.t + 4), "path-sum search")

    cum_v = np.zeros(n)
    # anc[x, d - t]: ancestor of x at depth d (or a unique negative id past x's depth)
    anc = -1 - np.tile(np.arange(n)[:, None], (1, top - yk.t + 1))
    anc[depth == yk.t, 0] = np.flatnonzero(depth == yk.t)
    for d in range(yk.t + 1, top + 1):
        nodes = np.flatnonzero((depth == d) & (yk.parent >= 0))
        par = yk.parent[nodes]
        cum_v[nodes] = g_e[yk.parent_edge[nodes]] + cum_v[par]
        anc[nodes, : d - yk.t] = anc[par, : d - yk.t]
        anc[nodes, d - yk.t] = nodes

    anchor_v = np.zeros((n, T), dtype=np.int64)
    anchor_pos = np.zeros((n, T), dtype=np.int64)
    half = np.zeros((n, T))
    prefix_of = [None] * len(yk.slices)
    for si, s in enumerate(yk.slices):
        anchors = _anchor_matrix(ps, si)
        pre = np.concatenate([[0.0], np.cumsum(g_e[s.edges])])
        prefix_of[si] = pre
        horiz = np.abs(pre[anchors] - pre[np.arange(len(s))][:, None])
        anchor_v[s.vertices] = s.vertices[anchors]
        anchor_pos[s.vertices] = anchors
        half[s.vertices] = horiz + cum_v[s.vertices[anchors]]

    best, arg = -1.0, (0, 0)
    others = np.arange(n)
    pos, slc = yk.pos, yk.slice_of
    for w0 in range(n):
        c = (col.labels[w0] * col.m + col.labels) % T
        a0 = anchor_v[w0, c]
        a1 = anchor_v[others, c]
        same = anc[a0] == anc[a1]
        lca_level = same.shape[1] - 1 - np.argmax(same[:, ::-1], axis=1)
        lca = anc[a0, lca_level]
        val = half[w0, c] + half[others, c] - cum_v[lca]
        # shared horizontal stretch: same slice, both on the same side of the block
        si = int(slc[w0])
        mates = np.flatnonzero(slc == si)
        if mates.size > 1:
            pre = prefix_of[si]
            cm = c[mates]
            p0, p1 = int(pos[w0]), pos[mates]
            anc0_pos, anc1_pos = anchor_pos[w0, cm], anchor_pos[mates, cm]
            both_left = (p0 < anc0_pos) & (p1 < anc1_pos)
            both_right = (p0 > anc0_pos) & (p1 > anc1_pos)
            shared = np.where(both_left, pre[anc0_pos] - pre[np.maximum(p0, p1)], 0.0)
            shared += np.where(both_right, pre[np.minimum(p0, p1)] - pre[anc0_pos], 0.0)
            val[mates] -= shared
        val[w0] = -np.inf
        i = int(np.argmax(val))
        if val[i] > best:
            best, arg = float(val[i]), (w0, i)
    return best, arg


# ---------------------------------------------------------------- certificate


@dataclass
class CongestionCertificate:
    p: float
    n: int
    bound: float
    loads: np.ndarray
    max_edge_load: int
    argmax_edge: int
    max_path_sum: float | None
    argmax_pair: tuple[int, int] | None
    certified: bool = True
    elapsed: float = 0.0
    formula_trace: dict = field(default_factory=dict)

    def to_record(self, timing: bool = False) -> dict:
        rec = {
            "p": self.p,
            "n": self.n,
            "bound": self.bound,
            "max_edge_load": self.max_edge_load,
            "argmax_edge": self.argmax_edge,
            "max_path_sum": self.max_path_sum,
            "argmax_pair": list(self.argmax_pair) if self.argmax_pair else None,
            "certified": self.certified,
            "trace": self.formula_trace,
        }
        if timing:
            rec["elapsed"] = self.elapsed
        return rec


def lemma_bound(
    system: PathSystem,
    p: float,
    loads: np.ndarray | None = None,
    budget: Budget | None = None,
    certified: bool = True,
) -> CongestionCertificate:
    """Path-counting lower bound on h^p for ``system``'s graph.

    Loads are computed exactly unless given (pass sampled loads together
    with ``certified=False``). Y_k systems use the grouped counters;
    anything else routes every pair.
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    t0 = time.perf_counter()
    n = system.n
    if n < 2 or system.graph.m == 0:
        raise ValueError("empty path system")
    is_yk = isinstance(system, YkPathSystem)
    if loads is None:
        loads = compute_congestion(system.yk, system.coloring, budget) if is_yk else loads_by_enumeration(system, budget)
    loads = np.asarray(loads)
    top_edge = int(np.argmax(loads))
    top_load = loads[top_edge]
    if top_load <= 0:
        raise ValueError("empty path system")
    trace: dict = {"n": n}
    if p == 1:
        bound = n / float(top_load)
        path_sum, pair = None, None
        trace["formula"] = "n / max_e M_e"
    else:
        if is_yk:
            path_sum, pair = yk_max_path_sum(system, loads, p, budget)
        else:
            path_sum, pair = max_path_sum_by_enumeration(system, loads, p)
        bound = n ** (1.0 / p) / path_sum ** ((p - 1.0) / p)
        trace["formula"] = "n^(1/p) / (max sum M_e^(1/(p-1)))^((p-1)/p)"
        trace["numerator"] = n ** (1.0 / p)
        trace["denominator"] = path_sum ** ((p - 1.0) / p)
    trace["total_load"] = int(np.sum(loads)) if np.issubdtype(loads.dtype, np.integer) else float(np.sum(loads))
    if is_yk:
        trace.update(system.coloring.balance())
        trace["T"], trace["k"], trace["t"] = system.yk.T, system.yk.k, system.yk.t
    top_load_out = int(top_load) if np.issubdtype(loads.dtype, np.integer) else float(top_load)
    return CongestionCertificate(
        float(p), n, float(bound), loads, top_load_out, top_edge, path_sum, pair, certified,
        time.perf_counter() - t0, trace,
    )


def proof_load_ratios(yk: YkGraph, loads: np.ndarray) -> dict:
    """Measured loads against the shapes of the proof's per-edge estimates.

    Horizontal edges are compared with ``T H^k * T H^(Qk)``; a vertical edge
    whose lower endpoint has vertical word ``v`` is compared with
    ``|Y|^2 / T * V^(-floor((|v| - t) / log2 H))``. Returns the largest
    ratio of each kind, i.e. the implied constants.
    """
    from .formulas import q_of
    from .roundtree import HORIZONTAL

    H, V, T, k, t = yk.H, yk.V, yk.T, yk.k, yk.t
    Q = q_of(H, V)
    n = yk.n
    kind = yk.rt.edge_kind
    horiz_ref = T * H**k * T * H ** (Q * k)
    h_ratio = float(loads[kind == HORIZONTAL].max() / horiz_ref) if np.any(kind == HORIZONTAL) else 0.0
    child = np.flatnonzero(yk.parent >= 0)
    vert_ratio = 0.0
    if child.size:
        steps = np.floor((yk.depth[child] - t) / math.log2(H))
        ref = n * n / T * V ** (-steps)
        vert_ratio = float(np.max(loads[yk.parent_edge[child]] / ref))
    return {"horizontal": h_ratio, "vertical": vert_ratio}
