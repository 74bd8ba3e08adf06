from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtprof.budget import Budget, BudgetExceeded
from rtprof.congestion import (
    Coloring,
    PathSystem,
    ShortestPathSystem,
    TreePathSystem,
    YkPathSystem,
    balanced_label_count,
    build_coloring,
    compute_congestion,
    lemma_bound,
    loads_by_enumeration,
    loads_sampled,
    max_path_sum_by_enumeration,
    proof_load_ratios,
    route,
    walk_vertices,
    yk_max_path_sum,
)
from rtprof.graph import complete_graph, path_graph, random_connected_graph
from rtprof.poincare import h1_sweep, h2_exact, hp_minimize
from rtprof.roundtree import build_yk


def test_coloring_examples():
    yk = build_yk(2, 2, 1.0, 2)  # T = 4
    col = build_coloring(yk)
    assert col.m == 2
    level1 = [s for s in yk.slices if len(s) == 8][0]
    assert col.labels[level1.vertices].tolist() == [0, 1, 0, 1, 0, 1, 0, 1]
    x = int(level1.vertices[1])
    y = int(level1.vertices[0])
    assert col.color(x, y) == 2
    yk1 = build_yk(2, 2, 1.0, 1)  # T = 2
    col1 = build_coloring(yk1)
    assert col1.m == 2
    assert {col1.color(a, b) for a in range(yk1.n) for b in range(yk1.n)} == {0, 1}


@pytest.mark.parametrize("T,m", [(1, 1), (2, 2), (3, 3), (4, 2), (8, 4), (9, 3), (12, 6), (16, 4)])
def test_balanced_label_count(T, m):
    assert balanced_label_count(T) == m
    assert m * m % T == 0 and m >= math.isqrt(T - 1) + 1 if T > 1 else True


def test_labels_follow_slice_position():
    yk = build_yk(2, 2, 1.5, 4)
    col = build_coloring(yk)
    for s in yk.slices:
        assert np.array_equal(col.labels[s.vertices], np.arange(len(s)) % col.m)


def test_route_examples_on_y1():
    yk = build_yk(2, 2, 1.0, 1)
    ps = YkPathSystem(yk)
    assert ps.path(3, 3) == []
    bound = yk.T * yk.H + 2 * yk.k + yk.T
    for a in range(yk.n):
        for b in range(yk.n):
            walk = ps.path(a, b)
            seq = walk_vertices(yk.graph, a, walk)
            assert seq[-1] == b
            assert len(walk) <= bound
    with pytest.raises(ValueError):
        ps.path(0, yk.n)


def test_routes_between_base_vertices_are_horizontal():
    yk = build_yk(2, 2, 1.0, 2)
    ps = YkPathSystem(yk)
    base = set(yk.y0.vertices.tolist())
    horiz = set(yk.y0.edges.tolist())
    for a in base:
        for b in base:
            assert set(ps.path(a, b)) <= horiz


def test_route_helper_and_symmetry_when_labels_coincide():
    yk = build_yk(2, 2, 1.0, 2)
    col = build_coloring(yk)
    ps = YkPathSystem(yk, col)
    rng = np.random.default_rng(0)
    for a, b in rng.integers(0, yk.n, size=(300, 2)):
        a, b = int(a), int(b)
        assert route(yk, col, a, b) == ps.path(a, b)
        if col.labels[a] == col.labels[b]:
            assert ps.path(b, a) == ps.path(a, b)[::-1]


def test_p2_and_k3_loads():
    assert loads_by_enumeration(ShortestPathSystem(path_graph(2))).tolist() == [2]
    assert loads_by_enumeration(ShortestPathSystem(complete_graph(3))).tolist() == [2, 2, 2]


@pytest.mark.parametrize(
    "args", [(2, 2, 1.0, 1), (2, 2, 1.0, 2), (2, 2, 1.5, 3), (3, 2, 1.0, 1), (2, 3, 1.0, 1), (2, 3, 1.2, 2), (3, 3, 1.0, 1)]
)
def test_fast_loads_match_enumeration(args):
    yk = build_yk(*args)
    ps = YkPathSystem(yk)
    fast = compute_congestion(yk)
    slow = loads_by_enumeration(ps)
    assert np.array_equal(fast, slow)
    # each pair contributes once per distinct edge of its route
    total = sum(len(set(ps.path(a, b))) for a in range(yk.n) for b in range(yk.n))
    assert int(fast.sum()) == total


@pytest.mark.parametrize("m", [3, 4, 5])
def test_fast_loads_with_other_label_counts(m):
    # unbalanced colourings (T does not divide m^2) must count exactly too
    yk = build_yk(2, 2, 1.0, 2)
    col = Coloring(yk.T, m, (yk.pos % m).astype(np.int64))
    assert np.array_equal(compute_congestion(yk, col), loads_by_enumeration(YkPathSystem(yk, col)))


def test_double_counting_for_shortest_paths():
    g = random_connected_graph(15, 0.3, np.random.default_rng(5))
    ps = ShortestPathSystem(g)
    loads = loads_by_enumeration(ps)
    assert int(loads.sum()) == sum(len(ps.path(a, b)) for a in range(g.n) for b in range(g.n))


@pytest.mark.parametrize("args", [(2, 2, 1.0, 2), (2, 2, 1.5, 3), (3, 2, 1.0, 1), (2, 3, 1.2, 2)])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_fast_path_sum_matches_enumeration(args, p):
    yk = build_yk(*args)
    ps = YkPathSystem(yk)
    loads = compute_congestion(yk)
    fast, pair = yk_max_path_sum(ps, loads, p)
    slow, _ = max_path_sum_by_enumeration(ps, loads, p)
    assert fast == pytest.approx(slow, rel=1e-12)
    g_e = loads.astype(float) ** (1 / (p - 1))
    assert fast == pytest.approx(sum(g_e[e] for e in set(ps.path(*pair))), rel=1e-12)


def test_lemma_examples():
    p2 = ShortestPathSystem(path_graph(2))
    assert lemma_bound(p2, 1).bound == pytest.approx(1.0)
    assert lemma_bound(p2, 2).bound == pytest.approx(1.0)
    k3 = ShortestPathSystem(complete_graph(3))
    c = lemma_bound(k3, 1)
    assert c.bound == pytest.approx(1.5) and c.max_edge_load == 2
    with pytest.raises(ValueError):
        lemma_bound(p2, 0.5)


def test_certificate_reproduces_formula():
    yk = build_yk(2, 2, 1.5, 3)
    ps = YkPathSystem(yk)
    c = lemma_bound(ps, 1.5)
    assert c.bound == pytest.approx(yk.n ** (1 / 1.5) / c.max_path_sum ** (0.5 / 1.5), rel=1e-15)
    c1 = lemma_bound(ps, 1)
    assert c1.bound == yk.n / c1.loads.max()
    rec = c.to_record()
    assert "elapsed" not in rec and rec["certified"] is True
    assert c.to_record(timing=True)["elapsed"] >= 0


def _upper(g, p):
    if p == 1:
        return h1_sweep(g).value
    if p == 2:
        return h2_exact(g).value
    return hp_minimize(g, p, restarts=8).value


@settings(max_examples=12, deadline=None)
@given(st.integers(3, 12), st.integers(0, 10**6), st.sampled_from([1.0, 1.5, 2.0]))
def test_soundness_on_random_graphs(n, seed, p):
    g = random_connected_graph(n, 0.35, np.random.default_rng(seed))
    for system in (ShortestPathSystem(g), TreePathSystem(g, 0)):
        assert lemma_bound(system, p).bound <= _upper(g, p) + 1e-9


@pytest.mark.parametrize("p", [1.0, 1.5])
def test_soundness_on_yk(p):
    for k in (1, 2, 3):
        yk = build_yk(2, 2, p, k)
        assert lemma_bound(YkPathSystem(yk), p).bound <= _upper(yk.graph, p) + 1e-9


def test_sampling_mode_is_flagged():
    yk = build_yk(2, 2, 1.0, 2)
    ps = YkPathSystem(yk)
    est = loads_sampled(ps, 4000, seed=1)
    exact = compute_congestion(yk)
    c = lemma_bound(ps, 1, loads=est, certified=False)
    assert c.certified is False
    assert est.max() == pytest.approx(exact.max(), rel=0.25)


def test_enumeration_respects_work_budget():
    ps = ShortestPathSystem(path_graph(50))
    with pytest.raises(BudgetExceeded):
        loads_by_enumeration(ps, Budget(work=100))
    yk = build_yk(2, 2, 1.0, 3)
    with pytest.raises(BudgetExceeded):
        compute_congestion(yk, budget=Budget(work=1000))


def test_generic_path_system_and_proof_ratios():
    ps = PathSystem(path_graph(3), lambda a, b: [0, 1] if (a, b) == (0, 2) else [0] if {a, b} == {0, 1} else [1] if {a, b} == {1, 2} else [1, 0])
    assert loads_by_enumeration(ps).tolist() == [4, 4]
    yk = build_yk(2, 2, 1.0, 3)
    ratios = proof_load_ratios(yk, compute_congestion(yk))
    assert 0 < ratios["horizontal"] < 10 and 0 < ratios["vertical"] < 10
