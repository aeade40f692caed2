from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import instances
from oracle import brute_opt
from setcover_reopt.core import Instance, PreconditionError, RatioFunction, is_cover
from setcover_reopt.harness import worsen_within
from setcover_reopt.modifications import AddElement, AddSet, RemoveElement, RemoveSet, make_reopt
from setcover_reopt.reductions import chain_add_element
from setcover_reopt.reopt_algorithms import (
    ChainError,
    InstanceChain,
    case_threshold,
    chain_from,
    eptas_fpt_driver,
    exact_routine,
    ptas_case_distinction,
    ptas_routine,
    repair_add_element,
)
from setcover_reopt.solvers import solve_exact


# repair


def test_repair_keeps_covering_solution(triangle):
    r = make_reopt(triangle, ["a", "b"], 1, AddElement("4", {"a"}))
    assert repair_add_element(r).names == ("a", "b")


def test_repair_adds_cheapest_set():
    old = Instance.build(["a"], {"s1": {"a"}, "s2": set(), "s3": set()}, {"s2": "1/2", "s3": 2})
    r = make_reopt(old, ["s1"], 1, AddElement("e", {"s2", "s3"}))
    out = repair_add_element(r)
    assert out.names == ("s1", "s2")
    assert out.value == Fraction(3, 2)


def test_repair_needs_element_addition(triangle):
    r = make_reopt(triangle, ["a", "b"], 1, RemoveSet("c"))
    with pytest.raises(PreconditionError):
        repair_add_element(r)


@st.composite
def add_element_reopt(draw, weighted=True):
    inst = draw(instances(weighted=weighted))
    into = draw(st.sets(st.sampled_from(inst.names), min_size=1))
    return inst, AddElement("fresh", into)


@given(add_element_reopt())
def test_repair_ratio_with_optimal_old(pair):
    inst, mod = pair
    r = make_reopt(inst, solve_exact(inst), 1, mod)
    out = repair_add_element(r)
    assert is_cover(r.new, out)
    assert out.value <= 2 * brute_opt(r.new)


@given(add_element_reopt())
def test_repair_ratio_with_degraded_old(pair):
    inst, mod = pair
    rho = Fraction(3, 2)
    opt = solve_exact(inst)
    sol = worsen_within(inst, opt, rho * opt.value)
    r = make_reopt(inst, sol, rho, mod)
    assert repair_add_element(r).value <= (1 + rho) * brute_opt(r.new)


# case distinction


def test_threshold():
    assert case_threshold(Fraction(1)) == 2
    assert case_threshold(Fraction(1, 4)) == 5
    assert case_threshold(Fraction(2, 3)) == 3


def test_small_branch_is_exact(triangle):
    r = make_reopt(triangle, ["a", "b"], 1, AddElement("4", {"c"}))
    out = ptas_case_distinction(r, 1)
    assert out.value == brute_opt(r.new) == 2


def test_large_removal_keeps_old_solution():
    # five disjoint singletons: OPT = 5 > T = 2 for eps = 1
    elems = [str(i) for i in range(5)]
    inst = Instance.build(elems, {f"s{e}": {e} for e in elems})
    r = make_reopt(inst, inst.names, 1, RemoveElement("0"))
    out = ptas_case_distinction(r, 1)
    assert out.chosen == frozenset(inst.names)
    assert out.value <= 2 * brute_opt(r.new)


def test_case_distinction_preconditions(triangle):
    with pytest.raises(PreconditionError):
        ptas_case_distinction(make_reopt(triangle, ["a", "b", "c"], 2, RemoveElement("1")), 1)
    with pytest.raises(PreconditionError):
        ptas_case_distinction(make_reopt(triangle, ["a", "b"], 1, AddSet("d", {"1"})), 1)
    weighted = Instance.build(["1"], {"s": {"1"}}, {"s": 2})
    with pytest.raises(PreconditionError):
        ptas_case_distinction(make_reopt(weighted, ["s"], 1, AddElement("2", {"s"})), 1)
    with pytest.raises(ValueError):
        ptas_case_distinction(make_reopt(triangle, ["a", "b"], 1, RemoveElement("1")), 0)


@given(instances(weighted=False, max_elements=7), st.data(), st.sampled_from([1, Fraction(1, 2), Fraction(1, 4)]))
def test_case_distinction_ratio(inst, data, eps):
    if data.draw(st.booleans()) or len(inst.universe) < 2:
        mod = AddElement("fresh", data.draw(st.sets(st.sampled_from(inst.names), min_size=1)))
    else:
        mod = RemoveElement(data.draw(st.sampled_from(inst.universe)))
    r = make_reopt(inst, solve_exact(inst), 1, mod)
    out = ptas_case_distinction(r, eps)
    assert is_cover(r.new, out)
    assert out.value <= (1 + Fraction(eps)) * brute_opt(r.new)


# driver


def test_empty_chain_returns_start_iff_within_bound(triangle):
    chain = InstanceChain((triangle,), (), solve_exact(triangle), RatioFunction.affine(1, 0))
    assert eptas_fpt_driver(chain, exact_routine, 2).within_k
    run = eptas_fpt_driver(chain, exact_routine, 1)
    assert not run.within_k and run.steps == 0


def test_missing_start_means_exceeds(triangle):
    chain = InstanceChain((triangle,), (), None, RatioFunction.affine(1, 0))
    assert not eptas_fpt_driver(chain, exact_routine, 5).within_k


def test_chain_shape_checked(triangle):
    with pytest.raises(ChainError):
        InstanceChain((triangle, triangle), (), None, RatioFunction.const(1))
    bad = InstanceChain((triangle, triangle), (RemoveSet("c"),), None, RatioFunction.const(1))
    with pytest.raises(ChainError):
        bad.check()


def test_chain_from_recovers_modifications(triangle):
    cg = chain_add_element(triangle)
    again = chain_from(cg.chain.instances, cg.chain.start_solution, cg.chain.bound)
    assert again.mods == cg.chain.mods


@given(instances(weighted=False, max_elements=5, max_sets=5), st.sampled_from(["exact", "ptas"]))
def test_driver_decides_on_element_chain(src, routine):
    # source names must avoid the reserved prefix; the strategy uses e*/s*
    cg = chain_add_element(src)
    opt = brute_opt(src)
    approx = exact_routine if routine == "exact" else ptas_routine
    for k in range(len(src.universe) + 1):
        run = eptas_fpt_driver(cg.chain, approx, k)
        assert run.within_k == (opt <= k)
        if run.within_k:
            assert run.solution.value == opt + 1


def test_driver_rejects_fractional_values():
    inst = Instance.build(["a"], {"s": {"a"}, "t": set()}, {"s": "1/2"})
    nxt = Instance.build(["a", "b"], {"s": {"a"}, "t": {"b"}}, {"s": "1/2"})
    chain = chain_from([inst, nxt], solve_exact(inst), RatioFunction.const(5))
    with pytest.raises(PreconditionError):
        eptas_fpt_driver(chain, exact_routine, 1)
