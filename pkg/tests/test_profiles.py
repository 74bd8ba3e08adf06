from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtprof.congestion import YkPathSystem, loads_by_enumeration
from rtprof.graph import Graph, complete_graph, components_after_removal, cycle_graph, path_graph, random_connected_graph, star_graph
from rtprof.poincare import h1_sweep
from rtprof.profiles import (
    ProfilePoint,
    cut_exact,
    cut_heuristic,
    cut_is_valid,
    epsilon_of,
    fit_exponent,
    fit_log_model,
    q_of,
    read_profile_csv,
    sep_point,
    sweep_yk,
    write_profile_csv,
)
from rtprof.roundtree import build_half_plane, build_yk


def exhaustive_cut(g: Graph, eps=Fraction(2, 3)) -> int:
    """Independent oracle: smallest subset whose removal leaves components of size <= eps n."""
    limit = eps * g.n
    for size in range(g.n + 1):
        for s in itertools.combinations(range(g.n), size):
            if all(c <= limit for c in components_after_removal(g, s)):
                return size
    raise AssertionError


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    return Graph(n, [(i, int(rng.integers(0, i))) for i in range(1, n)])


def test_reexported_formulas():
    assert q_of(4, 2) == pytest.approx(1.5)
    assert epsilon_of(1, 2) == pytest.approx(1 / 3)


def test_sweep_first_point_matches_enumeration():
    (pt,) = sweep_yk(2, 2, 1.0, [1])
    yk = build_yk(2, 2, 1.0, 1)
    top = loads_by_enumeration(YkPathSystem(yk)).max()
    assert pt.r == 10
    assert pt.lower_bound == pytest.approx(10 * (10 / top), rel=1e-15)


def test_sweep_sizes_increase_and_bounds_are_consistent():
    pts = sweep_yk(2, 2, 1.0, range(1, 4))
    assert [q.r for q in pts] == sorted({q.r for q in pts})
    assert all(q.consistent() for q in pts)
    pts = sweep_yk(2, 2, 1.5, range(1, 4))
    assert all(q.consistent() for q in pts)


def test_fit_examples():
    r = np.array([10, 100, 1000, 10_000])
    fit = fit_exponent(list(zip(r, r ** (1 / 3))))
    assert fit.slope == pytest.approx(1 / 3, rel=1e-12) and fit.r_squared == pytest.approx(1.0)
    fit = fit_exponent(list(zip(r, 5 * r**0.5)))
    assert fit.slope == pytest.approx(0.5, rel=1e-12) and fit.intercept == pytest.approx(math.log(5), rel=1e-12)
    assert fit.sample_count == 4 and fit.size_range == (10, 10_000)
    with pytest.raises(ValueError):
        fit_exponent([(10, 1.0)])
    with pytest.raises(ValueError):
        fit_exponent([(10, 1.0), (10, 2.0)])
    with pytest.raises(ValueError):
        fit_exponent([(10, 1.0), (20, -2.0)])


def test_log_model_fit():
    r = np.array([127, 255, 511, 1023])
    fit = fit_log_model(list(zip(r, 2 + 3 * np.log(r))))
    assert fit.slope == pytest.approx(3.0) and fit.r_squared == pytest.approx(1.0)


def test_profile_csv_round_trip(tmp_path):
    pts = [ProfilePoint("a", 10, 1.0, 2.5, 3.0), ProfilePoint("b", 84, 1.0, 5.25, None)]
    path = tmp_path / "pts.csv"
    write_profile_csv(pts, path)
    back = read_profile_csv(path)
    assert [(q.graph_id, q.r, q.lower_bound, q.upper_estimate) for q in back] == [
        ("a", 10, 2.5, 3.0), ("b", 84, 5.25, None)]
    write_profile_csv(back, tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


def test_cut_examples():
    assert cut_exact(path_graph(5)).size == 1
    assert cut_exact(complete_graph(6)).size == 2
    res = cut_exact(star_graph(7))
    assert res.cut_set == (0,) and res.optimal and res.method == "exact"
    with pytest.raises(ValueError):
        cut_exact(path_graph(21))
    with pytest.raises(ValueError):
        cut_exact(path_graph(5), epsilon=Fraction(3, 2))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 20), st.integers(0, 10**6))
def test_trees_have_cut_one(n, seed):
    g = random_tree(n, np.random.default_rng(seed))
    assert cut_exact(g).size == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(0, 10**6), st.floats(0.15, 0.8))
def test_cut_exact_matches_oracle_and_heuristic_is_valid(n, seed, prob):
    g = random_connected_graph(n, prob, np.random.default_rng(seed)) if n > 1 else Graph(1)
    ex = cut_exact(g)
    assert ex.size == exhaustive_cut(g)
    assert cut_is_valid(g, ex.cut_set)
    heur = cut_heuristic(g)
    assert heur.size >= ex.size and cut_is_valid(g, heur.cut_set) and not heur.optimal


@pytest.mark.parametrize("n", range(3, 21))
def test_heuristic_is_exact_on_paths_stars_cycles(n):
    for g in (path_graph(n), cycle_graph(n), star_graph(n - 1)):
        assert cut_heuristic(g).size == cut_exact(g).size


def test_heuristic_examples():
    assert cut_heuristic(path_graph(100)).size == 1
    hp = build_half_plane(2, 10)
    res = cut_heuristic(hp.graph)
    assert res.size <= 40 and res.max_component_fraction <= 2 / 3


def test_complete_graphs():
    for n in range(3, 13):
        assert cut_exact(complete_graph(n)).size == math.ceil(n / 3)


def test_sep_point_record():
    rec = sep_point(path_graph(5), graph_id="P5")
    assert rec == {"graph_id": "P5", "r": 5, "epsilon": "2/3", "cut_size": 1, "method": "exact", "optimal": True}
    assert sep_point(path_graph(30))["method"] == "heuristic"


def test_sep_and_h1_agree_within_envelope(corpus):
    ratios = []
    for name, g in corpus:
        if g.n > 700:
            continue
        cut = cut_exact(g).size if g.n <= 20 else cut_heuristic(g).size
        ratio = g.n * h1_sweep(g).value / cut
        ratios.append(ratio)
        assert 1 / 8 <= ratio <= 8 * g.max_degree, name
