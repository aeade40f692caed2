"""Hardness gadgets for set cover reoptimization.

Each constructor turns a plain set cover instance (or a graph, for the
dominating set chain) into a reoptimization instance whose old solution is
optimal by construction, together with the claimed relation between the
optima and a map that turns solutions of the modified instance back into
solutions of the source. The wrappers at the bottom run a reoptimization
solver through a gadget and extract a source solution.

Fresh names all start with ``_``: duplicate elements are ``<u>'``, fresh
elements ``_e<i>``, ``_enew``, ``_es_<set>``, ``_u``; added sets are
``_pair_<u>``, ``_dups``, ``_full``, ``_heavy``, ``_single_<u>``, ``_G``,
``_R`` and ``_E``. Sources must not use the ``_`` prefix.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

from .core import (
    ONE,
    ZERO,
    FormatError,
    Instance,
    NamedSet,
    PreconditionError,
    RatioFunction,
    SetCoverError,
    Solution,
    check_valid,
    is_cover,
    is_token,
)
from .modifications import (
    AddElement,
    AddSet,
    RemoveElement,
    RemoveSet,
    ReoptInstance,
    apply,
    make_reopt,
)
from .reopt_algorithms import InstanceChain
from .solvers import ORACLE_MAX_SETS, greedy, solve_exact

ADD_SET_UNWEIGHTED = "add-set-unweighted"
ADD_SET_WEIGHTED = "add-set-weighted"
REMOVE_SET = "remove-set"
REMOVE_SET_WEIGHTED = "remove-set-weighted"
ADD_ELEM_WEIGHTED = "add-elem-weighted"
RM_ELEM_WEIGHTED = "rm-elem-weighted"
ADD_ELEM_CHAIN = "add-elem-chain"
RM_ELEM_CHAIN = "rm-elem-chain"

GADGET_KINDS = (
    ADD_SET_UNWEIGHTED,
    ADD_SET_WEIGHTED,
    REMOVE_SET,
    REMOVE_SET_WEIGHTED,
    ADD_ELEM_WEIGHTED,
    RM_ELEM_WEIGHTED,
)
CHAIN_KINDS = (ADD_ELEM_CHAIN, RM_ELEM_CHAIN)

RESERVED_PREFIX = "_"


class DegenerateSourceError(PreconditionError):
    """The source instance is outside the construction's w.l.o.g. case."""


class RefutationError(SetCoverError):
    """A reoptimization solver broke its contract inside a wrapper."""


# graphs


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise PreconditionError("duplicate vertex")
        for e in self.edges:
            if len(e) != 2 or not e <= vs:
                raise PreconditionError(f"bad edge {sorted(e)}")

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> Graph:
        return cls(tuple(vertices), frozenset(frozenset(e) for e in edges))

    def neighbors(self, v: str) -> frozenset[str]:
        return frozenset(u for e in self.edges if v in e for u in e if u != v)

    def closed_neighborhood(self, v: str) -> frozenset[str]:
        return self.neighbors(v) | {v}


def closed_twins(g: Graph) -> list[tuple[str, str]]:
    """Pairs u < v with N(u) + u == N(v) + v."""
    seen: dict[frozenset[str], str] = {}
    twins = []
    for v in g.vertices:
        nb = g.closed_neighborhood(v)
        if nb in seen:
            twins.append((seen[nb], v))
        else:
            seen[nb] = v
    return twins


def domset_instance(g: Graph) -> Instance:
    """Universe V, one set N(v) + v per vertex, named after the vertex."""
    return Instance(g.vertices, tuple(NamedSet(v, g.closed_neighborhood(v)) for v in g.vertices))


def is_dominating(g: Graph, vertices: Iterable[str]) -> bool:
    dominated: set[str] = set()
    for v in vertices:
        dominated |= g.closed_neighborhood(v)
    return dominated.issuperset(g.vertices)


def format_graph(g: Graph) -> str:
    lines = [" ".join(["vertices:", *g.vertices])]
    lines += [f"edge {a} {b}" for a, b in sorted(tuple(sorted(e)) for e in g.edges)]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    vertices: list[str] | None = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if vertices is None:
            if words[0] != "vertices:":
                raise FormatError(f"line {lineno}: expected 'vertices:' first")
            vertices = words[1:]
        elif words[0] == "edge" and len(words) == 3 and words[1] != words[2]:
            edges.append((words[1], words[2]))
        else:
            raise FormatError(f"line {lineno}: expected 'edge <u> <v>'")
    if vertices is None:
        raise FormatError("missing 'vertices:' line")
    if not all(is_token(v) for v in vertices):
        raise FormatError("bad vertex name")
    try:
        return Graph.build(vertices, edges)
    except PreconditionError as exc:
        raise FormatError(str(exc)) from None


# gadget records


@dataclass(frozen=True)
class Gadget:
    """A constructed reoptimization instance with its claimed optimum
    relation OPT(new) = opt_scale * OPT(relation_base) + opt_shift and the
    claimed OPT(old) = value of the old solution."""

    kind: str
    source: Instance
    reopt: ReoptInstance
    relation: str
    relation_base: Instance
    opt_scale: Fraction
    opt_shift: Fraction
    extract: Callable[[Solution], Solution | None] = field(repr=False)
    metadata: Mapping[str, object] = field(default_factory=dict)

    @property
    def old_opt(self) -> Fraction:
        return self.reopt.old_solution.value

    def claimed_new_opt(self, base_opt: Fraction) -> Fraction:
        return self.opt_scale * base_opt + self.opt_shift


@dataclass(frozen=True)
class ChainGadget:
    kind: str
    chain: InstanceChain
    source: Instance
    metadata: Mapping[str, object] = field(default_factory=dict)


def _require_plain(src: Instance) -> None:
    check_valid(src)
    for name in (*src.universe, *src.names):
        if name.startswith(RESERVED_PREFIX):
            raise PreconditionError(f"name {name!r} uses the reserved prefix {RESERVED_PREFIX!r}")


def _require_unweighted(src: Instance) -> None:
    if src.weighted:
        raise PreconditionError("construction needs an unweighted source instance")


def _fill(src: Instance, chosen: Iterable[str]) -> Solution:
    """Add the least-named covering set for every element left uncovered."""
    names = set(chosen)
    covered: set[str] = set()
    for n in names:
        covered |= src.extent(n)
    for u in src.universe:
        if u not in covered:
            n = src.covering(u)[0]
            names.add(n)
            covered |= src.extent(n)
    return src.solution(names)


# adding a set


def _add_set_gadget(src: Instance, weighted: bool) -> Gadget:
    _require_unweighted(src)
    _require_plain(src)
    if not src.universe:
        raise DegenerateSourceError("empty universe")
    if src.max_extent_size() < 2:
        raise DegenerateSourceError("every set is a singleton; the source is solved by taking all sets")
    copy = {u: f"{u}'" for u in src.universe}
    if set(copy.values()) & set(src.universe):
        raise PreconditionError("duplicate-element names collide with the universe")
    pair = {u: f"_pair_{u}" for u in src.universe}
    family = (*src.family, *(NamedSet(pair[u], {u, copy[u]}) for u in src.universe))
    old = Instance((*src.universe, *copy.values()), family, weighted)
    mod = AddSet("_dups", frozenset(copy.values()), ZERO if weighted else ONE)
    reopt = make_reopt(old, pair.values(), 1, mod, check_quality=False)
    if weighted:
        relation, shift = "OPT(new) = OPT(src)", ZERO
    else:
        relation, shift = "OPT(new) = OPT(src) + 1", ONE
    return Gadget(
        ADD_SET_WEIGHTED if weighted else ADD_SET_UNWEIGHTED,
        src,
        reopt,
        relation,
        src,
        ONE,
        shift,
        partial(_extract_add_set, src, {p: u for u, p in pair.items()}),
        {"pair_sets": tuple(sorted(pair.values())), "added_set": "_dups"},
    )


def _extract_add_set(src: Instance, pair_of: Mapping[str, str], sol: Solution) -> Solution:
    if "_dups" not in sol.chosen:
        # every pair set was bought; a set of size >= 2 plus one set per
        # remaining element covers U with at most |U| - 1 sets
        seed = min((s for s in src.family if len(s.extent) >= 2), key=lambda s: (-len(s.extent), s.name))
        return _fill(src, [seed.name])
    # swap each pair set {u, u'} for a set covering u
    return _fill(src, (n for n in sol.chosen if n in src))


def gadget_add_set_unweighted(src: Instance) -> Gadget:
    """Duplicate every element, cover each (u, u') by a pair set; adding
    the set of all duplicates exposes the source: OPT(new) = OPT(src) + 1."""
    return _add_set_gadget(src, weighted=False)


def gadget_add_set_weighted(src: Instance) -> Gadget:
    """As the unweighted construction, but the added set costs 0."""
    return _add_set_gadget(src, weighted=True)


# removing a set


def gadget_remove_set(src: Instance, weighted: bool = False) -> Gadget:
    _require_unweighted(src)
    _require_plain(src)
    universe = frozenset(src.universe)
    if not universe:
        raise DegenerateSourceError("empty universe")
    full = [s.name for s in src.family if s.extent == universe]
    if full:
        raise DegenerateSourceError(f"set {full[0]} already covers the whole universe")
    old = Instance(src.universe, (*src.family, NamedSet("_full", universe)), weighted)
    reopt = make_reopt(old, ["_full"], 1, RemoveSet("_full"), check_quality=False)
    return Gadget(
        REMOVE_SET_WEIGHTED if weighted else REMOVE_SET,
        src,
        reopt,
        "OPT(new) = OPT(src), OPT(old) = 1",
        src,
        ONE,
        ZERO,
        partial(_extract_identity, src),
        {"added_set": "_full"},
    )


def _extract_identity(src: Instance, sol: Solution) -> Solution:
    return src.solution(sol.chosen)


# removing an element, weighted


def heavy_weight(src: Instance, f: RatioFunction) -> Fraction:
    return (f(len(src.universe)) + 1) * src.total_weight()


def gadget_remove_element_weighted(src: Instance, f: RatioFunction | None = None) -> Gadget:
    """Add a fresh element covered only by a new full set of weight
    W = (f(|U|) + 1) * total weight; removing the element exposes the
    source with a heavy set no f-approximation can afford."""
    _require_plain(src)
    f = f or RatioFunction.const(1)
    w_heavy = heavy_weight(src, f)
    fresh = "_u"
    old = Instance(
        (*src.universe, fresh),
        (*src.family, NamedSet("_heavy", {*src.universe, fresh}, w_heavy)),
        weighted=True,
    )
    reopt = make_reopt(old, ["_heavy"], 1, RemoveElement(fresh), check_quality=False)
    return Gadget(
        RM_ELEM_WEIGHTED,
        src,
        reopt,
        "OPT(new) = OPT(src), OPT(old) = W",
        src,
        ONE,
        ZERO,
        partial(_extract_drop_heavy, src),
        {"W": w_heavy, "f": str(f), "fresh_element": fresh},
    )


def _extract_drop_heavy(src: Instance, sol: Solution) -> Solution:
    return _fill(src, sol.chosen - {"_heavy"})


# adding an element, weighted


@dataclass(frozen=True)
class Preprocessed:
    """Source with forced singletons removed, other singletons dropped and
    a singleton ``_single_<u>`` added for every remaining element."""

    reduced: Instance
    forced: tuple[str, ...]
    singleton_origin: Mapping[str, str | None]


def preprocess_singletons(src: Instance) -> Preprocessed:
    _require_unweighted(src)
    _require_plain(src)
    forced: set[str] = set()
    forced_elements: set[str] = set()
    for u in src.universe:
        cov = src.covering(u)
        if all(src.extent(n) == {u} for n in cov):
            forced.add(cov[0])
            forced_elements.add(u)
    universe = [u for u in src.universe if u not in forced_elements]
    kept = [s for s in src.family if len(s.extent) >= 2]
    origin = {}
    for u in universe:
        singles = [n for n in src.covering(u) if src.extent(n) == {u}]
        origin[f"_single_{u}"] = singles[0] if singles else None
    singles = [NamedSet(f"_single_{u}", {u}) for u in universe]
    reduced = Instance(tuple(universe), (*kept, *singles))
    return Preprocessed(reduced, tuple(sorted(forced)), origin)


def _add_element_gadget(src: Instance, prep: Preprocessed, guess: int) -> Gadget:
    reduced = prep.reduced
    if not 1 <= guess <= len(reduced.universe):
        raise PreconditionError(f"guess {guess} outside [1, {len(reduced.universe)}]")
    tag = {s.name: f"_es_{s.name}" for s in reduced.family}
    family = [NamedSet(s.name, s.extent | {tag[s.name]}) for s in reduced.family]
    everything = frozenset(reduced.universe) | frozenset(tag.values())
    family.append(NamedSet("_G", everything, 2 * guess))
    family.append(NamedSet("_R", frozenset(tag.values()), guess))
    old = Instance(tuple(everything), tuple(family), weighted=True)
    reopt = make_reopt(old, ["_G"], 1, AddElement("_enew", {"_R"}), check_quality=False)
    return Gadget(
        ADD_ELEM_WEIGHTED,
        src,
        reopt,
        "OPT(new) = 2 OPT(preprocessed src) at the correct guess",
        reduced,
        Fraction(2),
        ZERO,
        partial(_extract_add_element, src, prep),
        {"guess": guess, "forced": prep.forced, "w(G)": 2 * guess, "w(R)": guess},
    )


def gadget_add_element_weighted(src: Instance, guess: int) -> Gadget:
    """Wrap the preprocessed source with a tag element e_s per set, a
    heavy set G = everything (weight 2*guess) and R = all tags (weight
    guess); the new element goes into R only. At guess = OPT, {G} is an
    optimal old solution and OPT(new) = 2 * guess."""
    return _add_element_gadget(src, preprocess_singletons(src), guess)


def _extract_add_element(src: Instance, prep: Preprocessed, sol: Solution) -> Solution | None:
    if "_G" in sol.chosen:
        return None
    chosen = {n for n in sol.chosen if n in src}
    covered: set[str] = set()
    for n in chosen:
        covered |= src.extent(n)
    for n in sorted(sol.chosen):
        if n not in prep.singleton_origin:
            continue
        u = n[len("_single_"):]
        if u in covered:
            continue
        pick = prep.singleton_origin[n] or src.covering(u)[0]
        chosen.add(pick)
        covered |= src.extent(pick)
    return src.solution(chosen | set(prep.forced))


# chains


def chain_add_element(src: Instance) -> ChainGadget:
    """Start from fresh elements e_1..e_{m+1} where set s_i = {e_i} and one
    set holds all of them, then add the source's elements one at a time.
    The last instance has OPT = OPT(src) + 1 and every intermediate
    optimum is at most OPT(src) + 1."""
    _require_unweighted(src)
    _require_plain(src)
    m = len(src.family)
    fresh = [f"_e{i}" for i in range(1, m + 2)]
    start = Instance(
        tuple(fresh),
        (*(NamedSet(s.name, {fresh[i]}) for i, s in enumerate(src.family)), NamedSet("_E", fresh)),
    )
    instances = [start]
    mods = []
    for u in src.universe:
        mod = AddElement(u, frozenset(src.covering(u)))
        instances.append(apply(instances[-1], mod, strict=True))
        mods.append(mod)
    chain = InstanceChain(
        tuple(instances), tuple(mods), start.solution(["_E"]), RatioFunction.affine(1, 1)
    )
    return ChainGadget(ADD_ELEM_CHAIN, chain, src, {"fresh_elements": tuple(fresh)})


def chain_remove_element(graph: Graph, approx_solution: Iterable[str]) -> ChainGadget:
    """Pin a dominating set S by giving each v in S a private element v',
    then remove the v' one at a time down to the plain dominating set
    instance. Every optimum along the way is at most |S|."""
    approx = frozenset(approx_solution)
    twins = closed_twins(graph)
    if twins:
        raise PreconditionError(f"vertices {twins[0][0]} and {twins[0][1]} have equal closed neighborhoods")
    if not approx <= set(graph.vertices) or not is_dominating(graph, approx):
        raise PreconditionError("approximate solution is not a dominating set")
    base = domset_instance(graph)
    copy = {v: f"{v}'" for v in sorted(approx)}
    if set(copy.values()) & set(graph.vertices):
        raise PreconditionError("pinning element names collide with vertex names")
    family = (
        NamedSet(s.name, s.extent | {copy[s.name]}) if s.name in copy else s for s in base.family
    )
    pinned = check_valid(Instance((*base.universe, *copy.values()), tuple(family)), strict=True)
    instances = [pinned]
    mods = []
    for v in sorted(approx):
        mod = RemoveElement(copy[v])
        instances.append(apply(instances[-1], mod, strict=True))
        mods.append(mod)
    chain = InstanceChain(
        tuple(instances),
        tuple(mods),
        pinned.solution(approx),
        RatioFunction.affine(2, 0),
        RatioFunction.affine(1, 0),
    )
    return ChainGadget(RM_ELEM_CHAIN, chain, base, {"graph": graph, "approx": tuple(sorted(approx))})


# transfer wrappers

ReoptSolver = Callable[[ReoptInstance], Solution]


def exact_reopt_solver(r: ReoptInstance) -> Solution:
    return solve_exact(r.new)


def greedy_reopt_solver(r: ReoptInstance) -> Solution:
    return greedy(r.new)


def build_gadget(kind: str, src: Instance, *, guess: int | None = None, f: RatioFunction | None = None) -> Gadget:
    if kind == ADD_SET_UNWEIGHTED:
        return gadget_add_set_unweighted(src)
    if kind == ADD_SET_WEIGHTED:
        return gadget_add_set_weighted(src)
    if kind == REMOVE_SET:
        return gadget_remove_set(src)
    if kind == REMOVE_SET_WEIGHTED:
        return gadget_remove_set(src, weighted=True)
    if kind == RM_ELEM_WEIGHTED:
        return gadget_remove_element_weighted(src, f)
    if kind == ADD_ELEM_WEIGHTED:
        if guess is None:
            raise PreconditionError("add-elem-weighted needs a guess")
        return gadget_add_element_weighted(src, guess)
    raise ValueError(f"unknown gadget kind {kind!r}")


def _run(gadget: Gadget, solver: ReoptSolver, claimed_ratio: RatioFunction | None) -> Solution:
    new = gadget.reopt.new
    sol = solver(gadget.reopt)
    if not is_cover(new, sol):
        raise RefutationError(f"{gadget.kind}: reoptimization solver returned a non-cover")
    sol = new.solution(sol.chosen)
    if claimed_ratio is not None and len(new.family) <= ORACLE_MAX_SETS:
        opt = solve_exact(new).value
        bound = claimed_ratio(len(new.universe)) * opt
        if sol.value > bound:
            raise RefutationError(
                f"{gadget.kind}: solver value {sol.value} exceeds claimed ratio bound {bound}"
            )
    return sol


def wrapper_transfer(
    src: Instance,
    kind: str,
    reopt_solver: ReoptSolver,
    *,
    f: RatioFunction | None = None,
    claimed_ratio: RatioFunction | None = None,
) -> Solution:
    """Solve ``src`` through a gadget and a reoptimization solver.

    For add-elem-weighted every guess in [1, |U|] is tried and the cheapest
    extraction wins; runs where the solver bought G are discarded. With an
    exact solver every kind returns an optimum of ``src``.
    """
    if kind != ADD_ELEM_WEIGHTED:
        gadget = build_gadget(kind, src, f=f)
        out = gadget.extract(_run(gadget, reopt_solver, claimed_ratio))
    else:
        prep = preprocess_singletons(src)
        if not prep.reduced.universe:
            return src.solution(prep.forced)
        out = None
        for guess in range(1, len(prep.reduced.universe) + 1):
            gadget = _add_element_gadget(src, prep, guess)
            got = gadget.extract(_run(gadget, reopt_solver, claimed_ratio))
            if got is not None and (out is None or (got.value, got.names) < (out.value, out.names)):
                out = got
        if out is None:
            raise RefutationError("every guess produced a solution containing G")
    if out is None or not is_cover(src, out):
        raise RefutationError(f"{kind}: extraction did not produce a cover of the source")
    return out
