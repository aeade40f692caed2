from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import instances
from oracle import brute_opt, brute_optima
from setcover_reopt.core import FormatError, Instance, PreconditionError, RatioFunction, is_cover
from setcover_reopt.reductions import (
    ADD_ELEM_WEIGHTED,
    ADD_SET_UNWEIGHTED,
    ADD_SET_WEIGHTED,
    GADGET_KINDS,
    REMOVE_SET,
    REMOVE_SET_WEIGHTED,
    RM_ELEM_WEIGHTED,
    DegenerateSourceError,
    Graph,
    RefutationError,
    build_gadget,
    chain_add_element,
    chain_remove_element,
    closed_twins,
    domset_instance,
    exact_reopt_solver,
    format_graph,
    gadget_add_element_weighted,
    gadget_add_set_unweighted,
    gadget_add_set_weighted,
    gadget_remove_element_weighted,
    gadget_remove_set,
    greedy_reopt_solver,
    heavy_weight,
    is_dominating,
    parse_graph,
    preprocess_singletons,
    wrapper_transfer,
)
from setcover_reopt.solvers import enumerate_optima, harmonic, solve_exact


# adding a set


def test_add_set_unweighted_triangle(triangle):
    g = gadget_add_set_unweighted(triangle)
    r = g.reopt
    assert len(r.old.universe) == 2 * len(triangle.universe) == 6
    assert g.old_opt == brute_opt(r.old) == 3
    assert brute_opt(r.new) == brute_opt(triangle) + 1 == 3
    ext = g.extract(solve_exact(r.new))
    assert is_cover(triangle, ext) and ext.value == brute_opt(triangle)


def test_add_set_weighted_triangle(triangle):
    g = gadget_add_set_weighted(triangle)
    assert g.reopt.mod.weight == 0
    assert g.old_opt == len(triangle.universe)
    assert brute_opt(g.reopt.new) == 2
    assert g.extract(solve_exact(g.reopt.new)).value == 2


def test_add_set_rejects_all_singletons():
    inst = Instance.build(["1", "2"], {"a": {"1"}, "b": {"2"}})
    with pytest.raises(DegenerateSourceError):
        gadget_add_set_unweighted(inst)


def test_extract_without_added_set_stays_below_pair_count(triangle):
    g = gadget_add_set_unweighted(triangle)
    pairs = g.reopt.new.solution(g.metadata["pair_sets"])
    ext = g.extract(pairs)
    assert is_cover(triangle, ext) and ext.value <= len(triangle.universe) - 1


@given(instances(weighted=False, max_elements=4, max_sets=5))
def test_add_set_relations(src):
    assume(src.max_extent_size() >= 2)
    for weighted, shift in ((False, 1), (True, 0)):
        g = build_gadget(ADD_SET_WEIGHTED if weighted else ADD_SET_UNWEIGHTED, src)
        opt = brute_opt(src)
        assert brute_opt(g.reopt.old) == g.old_opt
        assert brute_opt(g.reopt.new) == opt + shift
        assert g.extract(solve_exact(g.reopt.new)).value == opt


@given(instances(weighted=False, max_elements=3, max_sets=4))
def test_add_set_normalized_optimum_exists(src):
    assume(src.max_extent_size() >= 2)
    g = gadget_add_set_unweighted(src)
    pairs = set(g.metadata["pair_sets"])
    assert any("_dups" in o and not pairs & set(o) for o in brute_optima(g.reopt.new))


# removing a set


def test_remove_set_examples(triangle):
    g = gadget_remove_set(triangle)
    assert g.old_opt == brute_opt(g.reopt.old) == 1
    assert g.reopt.new == triangle
    assert brute_opt(g.reopt.new) == brute_opt(triangle)
    assert gadget_remove_set(triangle, weighted=True).reopt.old.weighted


def test_remove_set_rejects_full_set():
    inst = Instance.build(["1", "2"], {"a": {"1", "2"}, "b": {"1"}})
    with pytest.raises(DegenerateSourceError):
        gadget_remove_set(inst)


# removing an element, weighted


def test_heavy_weight_formula():
    src = Instance.build(["1", "2"], {"a": {"1"}, "b": {"2"}}, {"a": 2, "b": 3})
    assert heavy_weight(src, RatioFunction.const(1)) == 10
    g = gadget_remove_element_weighted(src)
    assert g.metadata["W"] == 10
    assert brute_opt(g.reopt.old) == 10
    assert brute_opt(g.reopt.new) == brute_opt(src) == 5


@given(instances(max_elements=5, max_sets=5), st.sampled_from(["const:1", "const:3/2", "logln:1"]))
def test_remove_element_relations(src, f):
    g = gadget_remove_element_weighted(src, RatioFunction.parse(f))
    assert brute_opt(g.reopt.old) == g.metadata["W"] == g.old_opt
    assert brute_opt(g.reopt.new) == brute_opt(src)


# adding an element, weighted


def test_add_element_weights_and_triangle(triangle):
    g = gadget_add_element_weighted(triangle, 2)
    new = g.reopt.new
    assert new.weight("_G") == 4 and new.weight("_R") == 2
    assert brute_opt(new) == 4
    for opt in brute_optima(new):
        assert "_R" in opt and "_G" not in opt


def test_preprocessing_forced_singletons():
    src = Instance.build(["1", "2", "3"], {"a": {"1"}, "b": {"2", "3"}, "c": {"2"}})
    prep = preprocess_singletons(src)
    assert prep.forced == ("a",)
    assert prep.reduced.universe == ("2", "3")
    assert set(prep.reduced.names) == {"b", "_single_2", "_single_3"}
    assert prep.singleton_origin == {"_single_2": "c", "_single_3": None}


def test_preprocessing_can_solve_everything():
    src = Instance.build(["1", "2"], {"a": {"1"}, "b": {"2"}})
    out = wrapper_transfer(src, ADD_ELEM_WEIGHTED, exact_reopt_solver)
    assert out.names == ("a", "b")


def test_add_element_guess_range(triangle):
    with pytest.raises(PreconditionError):
        gadget_add_element_weighted(triangle, 0)
    with pytest.raises(PreconditionError):
        gadget_add_element_weighted(triangle, 4)


@given(instances(weighted=False, max_elements=4, max_sets=4))
def test_add_element_structure_at_correct_guess(src):
    prep = preprocess_singletons(src)
    assume(prep.reduced.universe)
    guess = int(brute_opt(prep.reduced))
    g = gadget_add_element_weighted(src, guess)
    assert brute_opt(g.reopt.old) == g.old_opt == 2 * guess
    assert brute_opt(g.reopt.new) == 2 * guess
    assert all("_R" in o and "_G" not in o for o in brute_optima(g.reopt.new))


# chains


def test_add_element_chain(triangle):
    cg = chain_add_element(triangle)
    chain = cg.chain
    assert len(chain) == len(triangle.universe)
    opts = [brute_opt(i) for i in chain.instances]
    assert opts[-1] == brute_opt(triangle) + 1
    assert max(opts) <= brute_opt(triangle) + 1
    chain.check()


def test_remove_element_chain_on_path():
    p3 = Graph.build(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert brute_opt(domset_instance(p3)) == 1
    cg = chain_remove_element(p3, {"b"})
    assert cg.chain.instances[-1] == domset_instance(p3)
    assert solve_exact(cg.chain.instances[0]).names == ("b",)


def test_remove_element_chain_pins_approx():
    path = Graph.build("abcde", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])
    approx = {"a", "c", "e"}
    cg = chain_remove_element(path, approx)
    first = cg.chain.instances[0]
    assert [o for o in brute_optima(first)] == [tuple(sorted(approx))]
    assert max(brute_opt(i) for i in cg.chain.instances) <= len(approx)


def test_remove_element_chain_preconditions():
    twins = Graph.build(["a", "b"], [("a", "b")])
    assert closed_twins(twins) == [("a", "b")]
    with pytest.raises(PreconditionError):
        chain_remove_element(twins, {"a"})
    p3 = Graph.build(["a", "b", "c"], [("a", "b"), ("b", "c")])
    with pytest.raises(PreconditionError):
        chain_remove_element(p3, {"a"})


@given(st.integers(1, 6), st.data())
def test_domset_solutions_are_dominating_sets(n, data):
    vs = [f"v{i}" for i in range(n)]
    edges = [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:] if data.draw(st.booleans())]
    g = Graph.build(vs, edges)
    inst = domset_instance(g)
    chosen = data.draw(st.sets(st.sampled_from(vs)))
    assert is_cover(inst, chosen) == is_dominating(g, chosen)
    assert inst.solution(chosen).value == len(chosen)


def test_graph_format_round_trip():
    g = Graph.build(["b", "a", "c"], [("b", "a"), ("c", "b")])
    text = format_graph(g)
    assert text == "vertices: a b c\nedge a b\nedge b c\n"
    assert parse_graph(text) == g
    for bad in ["edge a b\n", "vertices: a b\nedge a a\n", "vertices: a\nedge a z\n"]:
        with pytest.raises(FormatError):
            parse_graph(bad)


# wrappers


@pytest.mark.parametrize("kind", GADGET_KINDS)
def test_exact_transfer_on_triangle(triangle, kind):
    assert wrapper_transfer(triangle, kind, exact_reopt_solver).value == brute_opt(triangle)


@given(instances(weighted=False, max_elements=4, max_sets=5), st.sampled_from(GADGET_KINDS))
def test_exact_transfer(src, kind):
    if kind in (ADD_SET_UNWEIGHTED, ADD_SET_WEIGHTED):
        assume(src.max_extent_size() >= 2)
    if kind in (REMOVE_SET, REMOVE_SET_WEIGHTED):
        assume(all(s.extent != frozenset(src.universe) for s in src.family))
    out = wrapper_transfer(src, kind, exact_reopt_solver)
    assert is_cover(src, out) and out.value == brute_opt(src)


@given(instances(max_elements=5, max_sets=5))
def test_exact_transfer_weighted_element_removal(src):
    assert wrapper_transfer(src, RM_ELEM_WEIGHTED, exact_reopt_solver).value == brute_opt(src)


@given(instances(weighted=False, max_elements=4, max_sets=5))
def test_greedy_through_add_set_gadget(src):
    assume(src.max_extent_size() >= 2)
    g = build_gadget(ADD_SET_UNWEIGHTED, src)
    d = g.reopt.new.max_extent_size()
    out = wrapper_transfer(src, ADD_SET_UNWEIGHTED, greedy_reopt_solver)
    assert out.value <= 2 * harmonic(d) * brute_opt(src)


def test_refutations(triangle):
    with pytest.raises(RefutationError):
        wrapper_transfer(triangle, REMOVE_SET, lambda r: r.new.solution([]))
    with pytest.raises(RefutationError):
        wrapper_transfer(
            triangle,
            REMOVE_SET,
            lambda r: r.new.solution(r.new.names),
            claimed_ratio=RatioFunction.const(1),
        )


def test_reserved_prefix_rejected():
    with pytest.raises(PreconditionError):
        gadget_remove_set(Instance.build(["1"], {"_x": {"1"}, "y": {"1"}}))


def test_enumerated_optima_agree_with_brute_force_on_gadget(triangle):
    g = gadget_add_element_weighted(triangle, 2)
    assert [o.names for o in enumerate_optima(g.reopt.new)] == brute_optima(g.reopt.new)
    assert g.metadata["w(R)"] == 2 and g.claimed_new_opt(Fraction(2)) == 4
