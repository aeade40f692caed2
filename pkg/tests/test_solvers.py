from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import instances
from oracle import brute_best, brute_opt, brute_optima
from setcover_reopt.core import InfeasibleInstanceError, Instance, PreconditionError, is_cover
from setcover_reopt.solvers import (
    OracleLimitError,
    SolveBudget,
    decide_bounded,
    enumerate_optima,
    greedy,
    harmonic,
    solve,
    solve_exact,
)


def test_single_set():
    sol = solve_exact(Instance.build(["a"], {"s1": {"a"}}))
    assert sol.names == ("s1",) and sol.value == 1


def test_triangle_optimum(triangle):
    assert solve_exact(triangle).value == brute_opt(triangle) == 2
    assert solve_exact(triangle).names == ("a", "b")


def test_weighted_prefers_two_cheap_sets():
    inst = Instance.build(["a", "b"], {"s1": {"a", "b"}, "s2": {"a"}, "s3": {"b"}}, {"s1": 3})
    sol = solve_exact(inst)
    assert sol.names == brute_best(inst) == ("s2", "s3")
    assert sol.value == 2


def test_tie_break_prefers_fewer_sets():
    # {s1} and {s2, s3} both cost 2
    inst = Instance.build(["a", "b"], {"s1": {"a", "b"}, "s2": {"a"}, "s3": {"b"}}, {"s1": 2})
    assert solve_exact(inst).names == ("s1",)


def test_exclude_and_size_limit(triangle):
    assert solve_exact(triangle, exclude=["a"]).names == ("b", "c")
    with pytest.raises(OracleLimitError):
        solve_exact(triangle, max_sets=2)
    with pytest.raises(InfeasibleInstanceError):
        solve_exact(triangle, exclude=["a", "b"])


def test_decide_bounded_examples(triangle):
    assert decide_bounded(triangle, 0) is None
    assert decide_bounded(triangle, 1) is None
    sol = decide_bounded(triangle, 2)
    assert len(sol) == 2 and is_cover(triangle, sol)


def test_decide_bounded_rejects_weighted():
    with pytest.raises(PreconditionError):
        decide_bounded(Instance.build(["a"], {"s": {"a"}}, {"s": 2}), 3)


def test_greedy_examples():
    full = Instance.build(["1", "2"], {"f": {"1", "2"}})
    assert greedy(full).names == ("f",)
    inst = Instance.build(["1", "2", "3", "4"], {"a": {"1", "2", "3"}, "b": {"1", "2"}, "c": {"3", "4"}})
    assert greedy(inst).names == ("a", "c")
    assert greedy(inst).value == 2
    zero = Instance.build(["1", "2"], {"f": {"1", "2"}, "g": {"1"}}, {"f": 0})
    assert greedy(zero).value == 0


def test_budget_dispatch(triangle):
    assert solve(triangle, SolveBudget("greedy")).value == 2
    assert solve(triangle, SolveBudget("bounded", k=1)) is None
    with pytest.raises(ValueError):
        SolveBudget("bounded")


def test_harmonic():
    assert harmonic(0) == 0
    assert harmonic(3) == Fraction(11, 6)


def test_time_limit_reports_oracle_limit():
    # 40 elements, every pair of consecutive elements a set: a long search
    n = 40
    elems = [f"e{i:02d}" for i in range(n)]
    sets = {f"s{i:02d}{j:02d}": {elems[i], elems[j]} for i in range(n) for j in range(i + 1, min(n, i + 4))}
    with pytest.raises(OracleLimitError):
        solve_exact(Instance.build(elems, sets), time_limit=0.0)


@given(instances())
def test_exact_matches_brute_force(inst):
    sol = solve_exact(inst)
    assert sol.names == brute_best(inst)
    assert sol.value == brute_opt(inst)


@given(instances(max_elements=5, max_sets=6))
def test_enumerate_optima_matches_brute_force(inst):
    assert [s.names for s in enumerate_optima(inst)] == brute_optima(inst)


@given(instances(weighted=False), st.integers(0, 7))
def test_decide_bounded_iff_opt_at_most_k(inst, k):
    opt = brute_opt(inst)
    sol = decide_bounded(inst, k)
    assert (sol is not None) == (opt <= k)
    if sol is not None:
        assert is_cover(inst, sol) and sol.value == opt


@given(instances())
def test_greedy_within_harmonic_bound(inst):
    sol = greedy(inst)
    opt = brute_opt(inst)
    assert is_cover(inst, sol)
    assert opt <= sol.value <= harmonic(inst.max_extent_size()) * opt


@given(instances())
def test_exact_is_deterministic(inst):
    assert solve_exact(inst) == solve_exact(inst)
