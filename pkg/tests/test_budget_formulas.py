from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtprof.budget import Budget, BudgetExceeded, budget_from_env
from rtprof.formulas import epsilon_of, predicted_exponent, profile_exponent, q_of, tree_exponent


def test_budget_env_forms():
    assert budget_from_env({}) == Budget()
    assert budget_from_env({"RTPROF_BUDGET": "500"}).vertices == 500
    b = budget_from_env({"RTPROF_BUDGET": "vertices=10,work=1e3"})
    assert (b.vertices, b.work) == (10, 1000)
    with pytest.raises(ValueError):
        budget_from_env({"RTPROF_BUDGET": "cpu=3"})


def test_budget_exceeded_reports_projection():
    with pytest.raises(BudgetExceeded) as info:
        Budget(vertices=5).check_vertices(6, "thing")
    assert info.value.projected == 6 and info.value.limit == 5


def test_q_examples():
    assert q_of(2, 2) == 2.0
    assert q_of(7, 1) == 1.0
    assert q_of(4, 2) == pytest.approx(1.5, rel=1e-15)
    with pytest.raises(ValueError):
        q_of(1, 2)


def test_epsilon_examples():
    assert epsilon_of(1, 2) == pytest.approx(1 / 3, rel=1e-15)
    assert epsilon_of(1.5, 2) == pytest.approx(2 / 21, rel=1e-14)
    assert epsilon_of(2 - 1e-12, 2) == pytest.approx(0.0, abs=1e-11)
    with pytest.raises(ValueError):
        epsilon_of(2, 2)


@given(st.floats(1.0, 10.0, exclude_min=True))
def test_epsilon_at_p1_closed_form(Q):
    assert epsilon_of(1, Q) == pytest.approx((Q - 1) / (2 * Q - 1), rel=1e-12)


@given(st.floats(1.01, 10.0), st.floats(0, 0.99))
def test_profile_exponent_is_tree_plus_epsilon(Q, frac):
    p = 1 + frac * (Q - 1)
    assert profile_exponent(p, Q) == pytest.approx(predicted_exponent(p, Q), rel=1e-9, abs=1e-12)
    assert predicted_exponent(p, Q) >= tree_exponent(p)
