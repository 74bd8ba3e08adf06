from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtprof.budget import Budget, BudgetExceeded
from rtprof.graph import Graph, component_labels
from rtprof.roundtree import (
    HORIZONTAL,
    VERTICAL,
    RoundTreeGraph,
    RtAddress,
    build_half_plane,
    build_round_tree,
    build_yk,
    format_word,
    int_to_word,
    parse_word,
    validate_round_tree,
    word_to_int,
    yk_parameters,
)


def _kind_counts_by_level(rt):
    lvl = rt.level
    out = {}
    for (u, v), k in zip(rt.graph.edges, rt.edge_kind):
        if k == HORIZONTAL:
            out[int(lvl[u])] = out.get(int(lvl[u]), 0) + 1
    return out


def _with_edges(rt, edges, kinds_by_pair):
    g = Graph(rt.n, edges)
    kinds = [kinds_by_pair[(int(u), int(v))] for u, v in g.edges]
    return rt.with_graph(g, kinds)


def test_address_and_words():
    assert str(RtAddress((0, 1), (1, 0))) == "h=01;v=10"
    with pytest.raises(ValueError):
        RtAddress((0,), ())
    assert parse_word(format_word((1, 0, 1))) == (1, 0, 1)
    assert parse_word(format_word((11, 3))) == (11, 3)
    assert word_to_int((1, 0, 1), 2) == 5
    assert int_to_word(5, 3, 2) == (1, 0, 1)


def test_round_tree_examples():
    rt = build_round_tree(2, 2, 1)
    assert rt.n == 5
    kinds = np.asarray(rt.edge_kind)
    assert int(np.sum(kinds == VERTICAL)) == 4 and int(np.sum(kinds == HORIZONTAL)) == 2
    assert build_round_tree(2, 2, 3).n == 85
    rt = build_round_tree(3, 1, 2)
    assert rt.n == 13
    assert _kind_counts_by_level(rt) == {1: 2, 2: 8}


@settings(max_examples=12, deadline=None)
@given(st.integers(2, 4), st.integers(1, 3), st.integers(0, 3))
def test_round_tree_counts_and_axioms(H, V, depth):
    rt = build_round_tree(H, V, depth)
    lvl = rt.level
    for i in range(depth + 1):
        assert int(np.sum(lvl == i)) == (H * V) ** i
    counts = _kind_counts_by_level(rt)
    for i in range(1, depth + 1):
        assert counts.get(i, 0) == V**i * (H**i - 1)
    # every non-root vertex has exactly one vertical edge to the level above
    up = np.zeros(rt.n, dtype=int)
    for (u, v), k in zip(rt.graph.edges, rt.edge_kind):
        if k == VERTICAL:
            child = u if lvl[u] > lvl[v] else v
            up[child] += 1
    assert up[0] == 0 and np.all(up[1:] == 1)
    assert validate_round_tree(rt).ok


def test_validation_catches_missing_horizontal_edge():
    rt = build_round_tree(2, 2, 2)
    pairs = {(int(u), int(v)): k for (u, v), k in zip(rt.graph.edges, rt.edge_kind)}
    drop = next(p for p, k in pairs.items() if k == HORIZONTAL)
    rest = {p: k for p, k in pairs.items() if p != drop}
    report = validate_round_tree(_with_edges(rt, list(rest), rest))
    assert report.failed() == [4]
    witness = next(c.witness for c in report.checks if c.axiom == 4)
    assert witness == {"missing": [rt.label(drop[0]), rt.label(drop[1])]}


def test_validation_catches_non_consecutive_edge():
    rt = build_round_tree(2, 2, 2)
    pairs = {(int(u), int(v)): k for (u, v), k in zip(rt.graph.edges, rt.edge_kind)}
    lvl = rt.level
    same_v = [i for i in range(rt.n) if lvl[i] == 2 and rt.v_int[i] == 0]
    a, b = sorted(same_v, key=lambda i: rt.h_int[i])[0], sorted(same_v, key=lambda i: rt.h_int[i])[2]
    pairs[(min(a, b), max(a, b))] = HORIZONTAL
    assert 5 in validate_round_tree(_with_edges(rt, list(pairs), pairs)).failed()


def test_round_tree_json_round_trip():
    rt = build_round_tree(3, 2, 2)
    back = RoundTreeGraph.from_dict(rt.to_dict())
    assert back.n == rt.n and np.array_equal(back.graph.edges, rt.graph.edges)
    assert [back.label(i) for i in range(back.n)] == [rt.label(i) for i in range(rt.n)]
    assert list(back.edge_kind) == list(rt.edge_kind)
    assert validate_round_tree(back).ok


def test_half_plane_examples():
    assert build_half_plane(2, 2).n == 7
    g0 = build_half_plane(2, 0)
    assert g0.n == 1 and g0.graph.m == 0
    hp = build_half_plane(3, 3)
    assert hp.n == 40 and hp.graph.max_degree <= 3 + 3


def test_budget_fails_fast():
    with pytest.raises(BudgetExceeded):
        build_round_tree(2, 2, 12, Budget(vertices=1000))
    with pytest.raises(BudgetExceeded):
        build_yk(2, 2, 1.0, 4, Budget(vertices=1000))


def test_yk_parameter_examples():
    assert yk_parameters(2, 2, 1.0, 2) == (4, 2)
    assert yk_parameters(2, 2, 1.0, 1) == (2, 1)
    assert yk_parameters(2, 2, 1.5, 3) == (2, 1)
    with pytest.raises(ValueError):
        yk_parameters(2, 2, 2.0, 1)


def test_yk_small_sizes_and_slices():
    yk = build_yk(2, 2, 1.0, 2)
    assert (yk.T, yk.t, yk.n) == (4, 2, 84)
    by_stage = {}
    for s in yk.slices:
        by_stage.setdefault(s.stage, []).append(len(s))
    assert by_stage == {0: [4], 1: [8, 8], 2: [16] * 4}
    assert build_yk(2, 2, 1.0, 1).n == 10


@pytest.mark.parametrize("args", [(2, 2, 1.0, 3), (2, 2, 1.5, 4), (3, 2, 1.0, 2), (2, 3, 1.2, 2), (4, 3, 1.0, 1)])
def test_yk_structure(args):
    yk = build_yk(*args)
    H, V = yk.H, yk.V
    assert yk.graph.is_connected()
    assert 1 <= yk.n / (yk.T * (H * V) ** yk.k) <= 2
    assert validate_round_tree(yk.rt).checks[0].passed
    # slices are horizontal paths of consecutive words
    for s in yk.slices:
        assert np.all(np.diff(s.h) == 1)
        for i in range(len(s) - 1):
            assert yk.graph.has_edge(int(s.vertices[i]), int(s.vertices[i + 1]))
    # every vertex above Y_0 has its vertical parent inside Y_k, one level up
    child = np.flatnonzero(yk.parent >= 0)
    assert np.all(yk.depth[yk.parent[child]] == yk.depth[child] - 1)
    assert np.all(yk.level_of[yk.parent[child]] <= yk.level_of[child])
    assert np.all(yk.parent[yk.y0.vertices] == -1)
    # slice lengths grow by a factor H per stage and cover Y_0's words
    for s in yk.slices:
        assert len(s) == yk.T * H**s.stage
        assert np.array_equal(np.unique(yk.anc0[s.vertices]), np.arange(yk.T))


def test_yk_sizes_for_acceptance_sweeps():
    assert [build_yk(2, 2, 1.0, k).n for k in range(1, 5)] == [10, 84, 680, 5456]
    assert [build_yk(2, 2, 1.5, k).n for k in range(1, 5)] == [10, 42, 170, 1023]


def test_yk_single_component():
    yk = build_yk(2, 2, 1.0, 2)
    count, _ = component_labels(yk.graph)
    assert count == 1
