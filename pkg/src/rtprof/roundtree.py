"""Round tree graphs RT^{H,V}, their axiom checker, and the Y_k witness subgraphs.

A vertex is an address pair ``(h, v)`` of words over ``[H]`` and ``[V]``.
Words are stored as (length, integer value) pairs: for words of a fixed
length, numeric order of the base-H value is the lexicographic order.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .budget import Budget
from .formulas import q_of
from .graph import Graph

VERTICAL = 0
HORIZONTAL = 1


@dataclass(frozen=True)
class RtAddress:
    h_word: tuple[int, ...]
    v_word: tuple[int, ...]

    def __post_init__(self):
        if len(self.h_word) != len(self.v_word):
            raise ValueError(f"address words differ in length: {self.h_word} vs {self.v_word}")

    def __str__(self) -> str:
        return f"h={format_word(self.h_word)};v={format_word(self.v_word)}"


def format_word(word: tuple[int, ...]) -> str:
    if any(a > 9 for a in word):
        return ".".join(map(str, word))
    return "".join(map(str, word))


def parse_word(s: str) -> tuple[int, ...]:
    if not s:
        return ()
    if "." in s:
        return tuple(int(x) for x in s.split("."))
    return tuple(int(c) for c in s)


def word_to_int(word: tuple[int, ...], base: int) -> int:
    x = 0
    for a in word:
        x = x * base + a
    return x


def int_to_word(x: int, length: int, base: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        x, out[i] = divmod(x, base)
    return tuple(out)


class RoundTreeGraph:
    """A graph whose vertices carry round-tree addresses and whose edges carry kinds.

    ``h_len``/``v_len`` and ``h_int``/``v_int`` encode the two address words
    of each vertex; ``edge_kind[e]`` is ``VERTICAL`` or ``HORIZONTAL``.
    """

    def __init__(self, graph: Graph, H: int, V: int, h_len, h_int, v_len, v_int, edge_kind):
        self.graph = graph
        self.H = int(H)
        self.V = int(V)
        self.h_len = np.asarray(h_len, dtype=np.int64)
        self.h_int = np.asarray(h_int, dtype=np.int64)
        self.v_len = np.asarray(v_len, dtype=np.int64)
        self.v_int = np.asarray(v_int, dtype=np.int64)
        self.edge_kind = np.asarray(edge_kind, dtype=np.int8)
        if len(self.h_len) != graph.n or len(self.edge_kind) != graph.m:
            raise ValueError("address or edge-kind arrays do not match the graph")
        self.depth = int(self.h_len.max()) if graph.n else 0

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def level(self) -> np.ndarray:
        return self.h_len

    def address(self, i: int) -> RtAddress:
        return RtAddress(
            int_to_word(int(self.h_int[i]), int(self.h_len[i]), self.H),
            int_to_word(int(self.v_int[i]), int(self.v_len[i]), self.V),
        )

    def label(self, i: int) -> str:
        return str(self.address(i))

    def with_graph(self, graph: Graph, edge_kind) -> RoundTreeGraph:
        """Same vertices and addresses over a different edge set (for perturbation tests)."""
        return RoundTreeGraph(graph, self.H, self.V, self.h_len, self.h_int, self.v_len, self.v_int, edge_kind)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [[int(u), int(v)] for u, v in self.graph.edges],
            "labels": {str(i): self.label(i) for i in range(self.n)},
            "edge_kinds": "".join("h" if k == HORIZONTAL else "v" for k in self.edge_kind),
            "H": self.H,
            "V": self.V,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RoundTreeGraph:
        n = int(d["n"])
        H, V = int(d["H"]), int(d["V"])
        labels = d["labels"]
        h_len, h_int, v_len, v_int = (np.zeros(n, dtype=np.int64) for _ in range(4))
        for i in range(n):
            hs, vs = labels[str(i)].split(";")[:2]
            hw, vw = parse_word(hs.removeprefix("h=")), parse_word(vs.removeprefix("v="))
            h_len[i], h_int[i] = len(hw), word_to_int(hw, H)
            v_len[i], v_int[i] = len(vw), word_to_int(vw, V)
        graph = Graph(n, [tuple(e) for e in d["edges"]], {int(k): v for k, v in labels.items()})
        kinds_by_pair = {}
        for (u, v), k in zip(d["edges"], d.get("edge_kinds", "")):
            kinds_by_pair[(min(u, v), max(u, v))] = HORIZONTAL if k == "h" else VERTICAL
        kinds = [kinds_by_pair.get((int(u), int(v)), VERTICAL) for u, v in graph.edges]
        return cls(graph, H, V, h_len, h_int, v_len, v_int, kinds)


def build_round_tree(H: int, V: int, depth: int, budget: Budget | None = None) -> RoundTreeGraph:
    """The (H, V)-regular round tree graph truncated at ``depth``.

    Level ``n`` holds ``(HV)^n`` vertices ordered by ``(v, h)``, so each
    horizontal slice is a contiguous index range.
    """
    if H < 2 or V < 1 or depth < 0:
        raise ValueError(f"need H >= 2, V >= 1, depth >= 0; got H={H}, V={V}, depth={depth}")
    (budget or Budget()).check_vertices((H * V) ** (depth + 1), f"RT^{{{H},{V}}} depth {depth}")

    offsets = [0]
    for lev in range(depth + 1):
        offsets.append(offsets[-1] + (H * V) ** lev)
    n = offsets[-1]
    h_len = np.zeros(n, dtype=np.int64)
    h_int = np.zeros(n, dtype=np.int64)
    v_int = np.zeros(n, dtype=np.int64)
    edges, kinds = [], []
    for lev in range(depth + 1):
        nh, nv = H**lev, V**lev
        idx = np.arange(offsets[lev], offsets[lev + 1])
        vv, hh = np.divmod(np.arange(nh * nv), nh)
        h_len[idx], h_int[idx], v_int[idx] = lev, hh, vv
        if lev > 0:
            ph, pv = hh // H, vv // V
            parent = offsets[lev - 1] + pv * (nh // H) + ph
            edges.append(np.stack([parent, idx], axis=1))
            kinds.append(np.full(len(idx), VERTICAL, dtype=np.int8))
        right = hh < nh - 1
        edges.append(np.stack([idx[right], idx[right] + 1], axis=1))
        kinds.append(np.full(int(right.sum()), HORIZONTAL, dtype=np.int8))
    e = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    k = np.concatenate(kinds) if kinds else np.zeros(0, dtype=np.int8)
    graph = Graph(n, e)
    kind = _kinds_in_graph_order(graph, e, k)
    return RoundTreeGraph(graph, H, V, h_len, h_int, h_len.copy(), v_int, kind)


def build_half_plane(H: int, depth: int, budget: Budget | None = None) -> RoundTreeGraph:
    """RT^{H,1}: the dual graph of the annular tiling of a hyperbolic half-plane."""
    return build_round_tree(H, 1, depth, budget)


def _kinds_in_graph_order(graph: Graph, raw_edges: np.ndarray, raw_kinds: np.ndarray) -> np.ndarray:
    canon = np.sort(raw_edges, axis=1)
    order = np.lexsort((canon[:, 1], canon[:, 0]))
    return raw_kinds[order]


# ---------------------------------------------------------------- validation


@dataclass
class AxiomCheck:
    axiom: int
    name: str
    passed: bool
    witness: object = None


@dataclass
class ValidationReport:
    checks: list[AxiomCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[int]:
        return [c.axiom for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "axioms": [
                {"axiom": c.axiom, "name": c.name, "passed": c.passed, "witness": c.witness} for c in self.checks
            ],
        }


def validate_round_tree(rt: RoundTreeGraph) -> ValidationReport:
    """Check the five round-tree axioms, reporting a witness for each failure.

    Branching (axiom 3) is only required below the deepest level, since a
    finite truncation has no children there.
    """
    H, V, g = rt.H, rt.V, rt.graph
    report = ValidationReport()
    key = {}
    for i in range(rt.n):
        key[(int(rt.h_len[i]), int(rt.h_int[i]), int(rt.v_len[i]), int(rt.v_int[i]))] = i

    # (1) equal word lengths
    bad = np.flatnonzero(rt.h_len != rt.v_len)
    report.checks.append(
        AxiomCheck(1, "equal word lengths", bad.size == 0, rt.label(int(bad[0])) if bad.size else None)
    )

    # (2) parent exists and is joined by a vertical edge
    witness = None
    for i in range(rt.n):
        hl, hi, vl, vi = int(rt.h_len[i]), int(rt.h_int[i]), int(rt.v_len[i]), int(rt.v_int[i])
        if hl == 0 or vl == 0:
            continue
        parent = key.get((hl - 1, hi // H, vl - 1, vi // V))
        if parent is None:
            witness = {"vertex": rt.label(i), "problem": "missing parent"}
            break
        if not g.has_edge(parent, i) or rt.edge_kind[g.edge_id(parent, i)] != VERTICAL:
            witness = {"vertex": rt.label(i), "problem": "missing vertical edge to parent"}
            break
    report.checks.append(AxiomCheck(2, "parent closure with vertical edges", witness is None, witness))

    # (3) admissible horizontal letters form an initial segment [Delta], 2 <= Delta <= H
    children: dict[tuple[int, int, int, int, int], set[int]] = defaultdict(set)
    for (hl, hi, vl, vi), i in key.items():
        if hl > 0 and vl > 0:
            children[(hl - 1, hi // H, vl - 1, vi // V, vi % V)].add(hi % H)
    witness = None
    for (hl, hi, vl, vi), i in sorted(key.items()):
        if hl != vl or hl >= rt.depth:
            continue
        for beta in range(V):
            alphas = children.get((hl, hi, vl, vi, beta), set())
            delta = len(alphas)
            if alphas != set(range(delta)) or not 2 <= delta <= H:
                witness = {"vertex": rt.label(i), "beta": beta, "letters": sorted(alphas)}
                break
        if witness:
            break
    report.checks.append(AxiomCheck(3, "horizontal branching is an initial segment", witness is None, witness))

    # (4) lexicographically consecutive words at fixed v are joined horizontally
    slices: dict[tuple[int, int], list[tuple[int, int, int]]] = defaultdict(list)
    for (hl, hi, vl, vi), i in key.items():
        slices[(vl, vi)].append((hl, hi, i))
    consecutive = set()
    witness = None
    for sk in sorted(slices):
        members = sorted(slices[sk])
        for (_, _, a), (_, _, b) in zip(members, members[1:]):
            consecutive.add((min(a, b), max(a, b)))
            if witness is None and (not g.has_edge(a, b) or rt.edge_kind[g.edge_id(a, b)] != HORIZONTAL):
                witness = {"missing": [rt.label(a), rt.label(b)]}
    report.checks.append(AxiomCheck(4, "consecutive words joined horizontally", witness is None, witness))

    # (5) no other edges
    witness = None
    for eid, (a, b) in enumerate(g.edges):
        a, b = int(a), int(b)
        if rt.edge_kind[eid] == HORIZONTAL:
            ok = (a, b) in consecutive
        else:
            ok = _is_parent(rt, a, b) or _is_parent(rt, b, a)
        if not ok:
            witness = {"edge": [rt.label(a), rt.label(b)], "kind": "h" if rt.edge_kind[eid] == HORIZONTAL else "v"}
            break
    report.checks.append(AxiomCheck(5, "every edge vertical or horizontal", witness is None, witness))
    return report


def _is_parent(rt: RoundTreeGraph, a: int, b: int) -> bool:
    return bool(
        rt.h_len[b] == rt.h_len[a] + 1
        and rt.v_len[b] == rt.v_len[a] + 1
        and rt.h_int[b] // rt.H == rt.h_int[a]
        and rt.v_int[b] // rt.V == rt.v_int[a]
    )


# ---------------------------------------------------------------- Y_k witness graphs


@dataclass
class Slice:
    """A horizontal path ``pi_V^{-1}(v)``: contiguous words at one vertical address."""

    v_int: int
    depth: int
    stage: int
    h: np.ndarray  # sorted h-word values
    vertices: np.ndarray  # vertex ids in h order
    edges: np.ndarray  # horizontal edge ids between positions i and i+1

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass
class YkGraph:
    """The witness subgraph Y_k with its construction bookkeeping.

    ``rt`` is Y_k itself as an addressed graph. ``anc0[x]`` is the index in
    Y_0 of the depth-``t`` ancestor of ``x``; ``parent``/``parent_edge`` are
    -1 on Y_0.
    """

    rt: RoundTreeGraph
    H: int
    V: int
    p: float
    k: int
    T: int
    t: int
    slices: list[Slice]
    level_of: np.ndarray
    slice_of: np.ndarray
    pos: np.ndarray
    parent: np.ndarray
    parent_edge: np.ndarray
    anc0: np.ndarray

    @property
    def graph(self) -> Graph:
        return self.rt.graph

    @property
    def n(self) -> int:
        return self.rt.n

    @property
    def y0(self) -> Slice:
        return self.slices[0]

    @property
    def depth(self) -> np.ndarray:
        return self.rt.h_len


def yk_parameters(H: int, V: int, p: float, k: int) -> tuple[int, int]:
    """Base path length ``T`` and base depth ``t`` for given ``(H, V, p, k)``."""
    Q = q_of(H, V)
    if not 1 <= p < Q:
        raise ValueError(f"need 1 <= p < Q = {Q:.6g}, got p={p}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    T = max(2, math.floor(H ** (k * (Q - p) / p) + 0.5))
    t = 0
    while H**t < T:
        t += 1
    return T, t


def build_yk(
    H: int,
    V: int,
    p: float,
    k: int,
    budget: Budget | None = None,
    branching: Callable[[int, int, int, int], int] | None = None,
) -> YkGraph:
    """Build Y_k inside RT^{H,V}.

    Y_0 is the first ``T`` words at depth ``t`` over ``v = 0^t``. Each stage
    extends every maximal slice by one vertical letter ``beta`` and as many
    trailing zeros ``j`` as needed for the child slice to reach length
    ``T H^i``. ``branching(depth, h, v, beta)`` gives the number of
    admissible horizontal letters below ``(h, v)``; the regular tree uses
    ``H`` everywhere, which always gives ``j = 0``.
    """
    T, t = yk_parameters(H, V, p, k)
    projected = T * sum((H * V) ** i for i in range(k + 1))
    (budget or Budget()).check_vertices(projected, f"Y_{k} for H={H}, V={V}, p={p}")
    delta = branching or (lambda depth, h, v, beta: H)

    slices: list[Slice] = []
    parent_slice: list[int] = []
    next_id = 0

    def add_slice(v_int, depth, stage, h, parent_idx):
        nonlocal next_id
        ids = np.arange(next_id, next_id + len(h), dtype=np.int64)
        next_id += len(h)
        slices.append(Slice(v_int, depth, stage, h, ids, np.zeros(0, dtype=np.int64)))
        parent_slice.append(parent_idx)
        return len(slices) - 1

    add_slice(0, t, 0, np.arange(T, dtype=np.int64), -1)
    frontier = [0]
    for i in range(1, k + 1):
        target = T * H**i
        new_frontier = []
        for si in frontier:
            base = slices[si]
            for beta in range(V):
                cur, v_int, depth = si, base.v_int * V + beta, base.depth + 1
                while True:
                    h = _children_words(slices[cur].h, depth - 1, slices[cur].v_int, v_int % V, H, delta)
                    cur = add_slice(v_int, depth, i, h, cur)
                    if len(h) >= target:
                        break
                    v_int, depth = v_int * V, depth + 1  # append a 0 letter
                new_frontier.append(cur)
        frontier = new_frontier

    n = next_id
    h_len = np.empty(n, dtype=np.int64)
    h_int = np.empty(n, dtype=np.int64)
    v_int = np.empty(n, dtype=np.int64)
    level_of = np.empty(n, dtype=np.int64)
    slice_of = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    anc0 = np.empty(n, dtype=np.int64)
    raw_edges, raw_kinds = [], []
    for si, s in enumerate(slices):
        ids = s.vertices
        h_len[ids] = s.depth
        h_int[ids] = s.h
        v_int[ids] = s.v_int
        level_of[ids] = s.stage
        slice_of[ids] = si
        pos[ids] = np.arange(len(ids))
        raw_edges.append(np.stack([ids[:-1], ids[1:]], axis=1))
        raw_kinds.append(np.full(len(ids) - 1, HORIZONTAL, dtype=np.int8))
        ps = parent_slice[si]
        if ps < 0:
            anc0[ids] = np.arange(len(ids))
            continue
        par = slices[ps]
        ppos = np.searchsorted(par.h, s.h // H)
        parent[ids] = par.vertices[ppos]
        anc0[ids] = anc0[parent[ids]]
        raw_edges.append(np.stack([parent[ids], ids], axis=1))
        raw_kinds.append(np.full(len(ids), VERTICAL, dtype=np.int8))
    e = np.concatenate(raw_edges)
    kinds = np.concatenate(raw_kinds)
    graph = Graph(n, e)
    kind = _kinds_in_graph_order(graph, e, kinds)
    rt = RoundTreeGraph(graph, H, V, h_len, h_int, h_len.copy(), v_int, kind)

    parent_edge = np.full(n, -1, dtype=np.int64)
    has_parent = parent >= 0
    parent_edge[has_parent] = _edge_ids(graph, parent[has_parent], np.flatnonzero(has_parent))
    for s in slices:
        s.edges = _edge_ids(graph, s.vertices[:-1], s.vertices[1:])
    return YkGraph(rt, H, V, float(p), k, T, t, slices, level_of, slice_of, pos, parent, parent_edge, anc0)


def _children_words(h: np.ndarray, depth: int, v_int: int, beta: int, H: int, delta) -> np.ndarray:
    counts = np.array([delta(depth, int(x), v_int, beta) for x in h], dtype=np.int64)
    if np.all(counts == H):
        return (h[:, None] * H + np.arange(H)[None, :]).ravel()
    out = [int(x) * H + a for x, c in zip(h, counts) for a in range(c)]
    return np.asarray(out, dtype=np.int64)


def _edge_ids(graph: Graph, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised edge-index lookup for existing edges ``{a[i], b[i]}``."""
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    keys = graph.edges[:, 0] * graph.n + graph.edges[:, 1]  # sorted, by canonical ordering
    found = np.searchsorted(keys, lo * graph.n + hi)
    if len(found) and (found.max() >= len(keys) or np.any(keys[found] != lo * graph.n + hi)):
        raise KeyError("edge not present")
    return found.astype(np.int64)
