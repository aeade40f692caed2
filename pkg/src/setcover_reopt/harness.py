"""Seeded instance generation and batch oracle certification.

Randomness comes from SplitMix64 (Steele, Lea, Flood 2014) so that a seed
pins the same instances in any implementation:

    state = (state + 0x9E3779B97F4A7C15) mod 2^64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output z ^ (z >> 31)

``below(n)`` draws by rejection from the largest multiple of n below 2^64,
and a Bernoulli(p) trial for rational p = a/b succeeds iff output * b < a * 2^64.
"""

from __future__ import annotations

import time
import warnings
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .core import (
    ONE,
    DuplicateExtentWarning,
    ZERO,
    Instance,
    NamedSet,
    PreconditionError,
    RatioFunction,
    Solution,
    format_rational,
    is_cover,
    restrict,
    validate,
)
from .modifications import AddElement, RemoveElement, make_reopt
from .reductions import (
    ADD_ELEM_CHAIN,
    ADD_ELEM_WEIGHTED,
    ADD_SET_UNWEIGHTED,
    ADD_SET_WEIGHTED,
    REMOVE_SET,
    REMOVE_SET_WEIGHTED,
    RM_ELEM_CHAIN,
    RM_ELEM_WEIGHTED,
    ChainGadget,
    Gadget,
    Graph,
    build_gadget,
    chain_add_element,
    chain_remove_element,
    closed_twins,
    domset_instance,
    exact_reopt_solver,
    preprocess_singletons,
    wrapper_transfer,
)
from .reopt_algorithms import (
    eptas_fpt_driver,
    exact_routine,
    ptas_case_distinction,
    repair_add_element,
)
from .solvers import OracleLimitError, enumerate_optima, greedy, harmonic, solve_exact

MASK64 = (1 << 64) - 1

REPAIR = "repair"
PTAS = "ptas"

KINDS = (
    ADD_SET_UNWEIGHTED,
    ADD_SET_WEIGHTED,
    REMOVE_SET,
    REMOVE_SET_WEIGHTED,
    ADD_ELEM_WEIGHTED,
    RM_ELEM_WEIGHTED,
    ADD_ELEM_CHAIN,
    RM_ELEM_CHAIN,
    REPAIR,
    PTAS,
)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next()
            if x < limit:
                return x % n

    def between(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def bernoulli(self, p: Fraction) -> bool:
        return self.next() * p.denominator < p.numerator << 64

    def sample(self, items: list, k: int) -> list:
        pool = list(items)
        out = []
        for _ in range(min(k, len(pool))):
            out.append(pool.pop(self.below(len(pool))))
        return out


@dataclass(frozen=True)
class GenSpec:
    """Random instance shape.

    Every (set, element) pair is a member with probability ``density``;
    elements left uncovered are patched into a uniformly drawn set. With
    ``weight_range`` set, weights are lo + (hi - lo) * j / weight_steps for
    uniform j in [0, weight_steps]; otherwise the instance is unweighted.
    """

    seed: int = 0
    n_elements: int = 6
    n_sets: int = 8
    density: Fraction = Fraction(2, 5)
    weight_range: tuple[Fraction, Fraction] | None = None
    weight_steps: int = 4
    strict: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "density", Fraction(self.density))
        if self.n_elements < 1 or self.n_sets < 1:
            raise PreconditionError("need at least one element and one set")
        if not 0 < self.density <= 1:
            raise PreconditionError("density must lie in (0, 1]")
        if self.weight_range is not None:
            lo, hi = (Fraction(x) for x in self.weight_range)
            if not 0 <= lo <= hi:
                raise PreconditionError("weight range must satisfy 0 <= lo <= hi")
            object.__setattr__(self, "weight_range", (lo, hi))

    def scaled(self, n_elements: int, n_sets: int) -> GenSpec:
        return GenSpec(self.seed, n_elements, n_sets, self.density, self.weight_range, self.weight_steps, self.strict)


def _names(prefix: str, n: int) -> list[str]:
    width = len(str(n))
    return [f"{prefix}{i:0{width}d}" for i in range(1, n + 1)]


def draw_instance(rng: SplitMix64, spec: GenSpec) -> Instance:
    elements = _names("u", spec.n_elements)
    names = _names("S", spec.n_sets)
    extents = [{e for e in elements if rng.bernoulli(spec.density)} for _ in names]
    for e in elements:
        if not any(e in ext for ext in extents):
            extents[rng.below(len(names))].add(e)
    weights = [ONE] * len(names)
    if spec.weight_range is not None:
        lo, hi = spec.weight_range
        weights = [lo + (hi - lo) * Fraction(rng.below(spec.weight_steps + 1), spec.weight_steps) for _ in names]
    family = []
    seen: set[frozenset[str]] = set()
    for name, ext, w in zip(names, extents, weights):
        ext = frozenset(ext)
        if spec.strict and ext in seen:
            continue
        seen.add(ext)
        family.append(NamedSet(name, ext, w))
    return Instance(tuple(elements), tuple(family), spec.weight_range is not None)


def generate(spec: GenSpec) -> Instance:
    """The instance pinned by ``spec`` (including its seed)."""
    return draw_instance(SplitMix64(spec.seed), spec)


def draw_graph(rng: SplitMix64, n: int, density: Fraction, max_tries: int = 1000) -> Graph:
    """Random graph on v1..vn without closed-neighborhood twins."""
    vertices = _names("v", n)
    for _ in range(max_tries):
        edges = [
            (a, b)
            for i, a in enumerate(vertices)
            for b in vertices[i + 1:]
            if rng.bernoulli(density)
        ]
        g = Graph.build(vertices, edges)
        if not closed_twins(g):
            return g
    raise PreconditionError(f"no twin-free graph found in {max_tries} draws")


def generate_graph(spec: GenSpec) -> Graph:
    return draw_graph(SplitMix64(spec.seed), spec.n_elements, spec.density)


# certification


@dataclass
class TrialRecord:
    kind: str
    trial: int
    seed: int
    status: str = "pass"  # pass | fail | inconclusive
    relation: str = ""
    src_opt: Fraction | None = None
    old_opt: Fraction | None = None
    new_opt: Fraction | None = None
    failed: list[str] = field(default_factory=list)
    detail: str = ""
    elapsed: float = 0.0
    stats: dict[str, Fraction] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def check(self, name: str, ok: bool, witness: str = "") -> None:
        if not ok:
            self.failed.append(name)
            self.status = "fail"
            if witness and not self.detail:
                self.detail = f"{name}: {witness}"


@dataclass
class Report:
    kind: str
    spec: GenSpec
    records: list[TrialRecord]

    HEADER = ("kind", "trial", "seed", "status", "relation", "src_opt", "old_opt", "new_opt", "failed", "detail")

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.records)

    @property
    def failed(self) -> list[TrialRecord]:
        return [r for r in self.records if r.status == "fail"]

    @property
    def all_pass(self) -> bool:
        return self.passed == len(self.records)

    def to_tsv(self, timings: bool = False) -> str:
        header = self.HEADER + (("seconds",) if timings else ())
        lines = ["\t".join(header)]
        for r in sorted(self.records, key=lambda r: r.trial):
            row = [
                r.kind,
                str(r.trial),
                str(r.seed),
                r.status,
                r.relation,
                _fmt(r.src_opt),
                _fmt(r.old_opt),
                _fmt(r.new_opt),
                ",".join(r.failed) or "-",
                r.detail.replace("\t", " ") or "-",
            ]
            if timings:
                row.append(f"{r.elapsed:.4f}")
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"


def _fmt(q: Fraction | None) -> str:
    return "-" if q is None else format_rational(q)


def greedy_within_bound(inst: Instance, opt: Fraction) -> bool:
    return greedy(inst).value <= harmonic(inst.max_extent_size()) * opt


def certify_gadget(gadget: Gadget, rec: TrialRecord, *, check_transfer: bool = True) -> None:
    """Oracle-check one gadget's claims, recording failures on ``rec``."""
    r = gadget.reopt
    src_opt = solve_exact(gadget.source).value
    base_opt = src_opt if gadget.relation_base is gadget.source else solve_exact(gadget.relation_base).value
    old_opt = solve_exact(r.old).value
    new_opt = solve_exact(r.new).value
    rec.relation = gadget.relation
    rec.src_opt, rec.old_opt, rec.new_opt = src_opt, old_opt, new_opt
    rec.check("old_cover", is_cover(r.old, r.old_solution))
    rec.check("old_optimal", r.old_solution.value == old_opt, f"val {r.old_solution.value} vs OPT {old_opt}")
    claimed = gadget.claimed_new_opt(base_opt)
    rec.check("relation", new_opt == claimed, f"OPT(new) {new_opt} vs claimed {claimed}")
    for label, inst, opt in (("src", gadget.source, src_opt), ("old", r.old, old_opt), ("new", r.new, new_opt)):
        rec.check(f"greedy_bound_{label}", greedy_within_bound(inst, opt))
    extracted = gadget.extract(solve_exact(r.new))
    rec.check("extract_cover", extracted is not None and is_cover(gadget.source, extracted))
    if gadget.kind in (ADD_SET_WEIGHTED, REMOVE_SET, REMOVE_SET_WEIGHTED, RM_ELEM_WEIGHTED):
        rec.check("extract_value", extracted is not None and extracted.value == new_opt)
    if gadget.kind == ADD_SET_UNWEIGHTED:
        rec.check("extract_value", extracted is not None and extracted.value == new_opt - 1)
        pairs = set(gadget.metadata["pair_sets"])
        rec.check(
            "normalization",
            any("_dups" in s.chosen and not (s.chosen & pairs) for s in enumerate_optima(r.new)),
        )
    if gadget.kind == RM_ELEM_WEIGHTED:
        rec.check("old_value_W", old_opt == gadget.metadata["W"])
    if gadget.kind in (REMOVE_SET, REMOVE_SET_WEIGHTED):
        rec.check("old_value_1", old_opt == 1)
    if gadget.kind == ADD_ELEM_WEIGHTED:
        optima = enumerate_optima(r.new)
        rec.check(
            "optima_structure",
            all("_R" in s.chosen and "_G" not in s.chosen for s in optima),
            f"{len(optima)} optima",
        )
        rec.stats["optima"] = Fraction(len(optima))
    if check_transfer:
        kw = {"f": RatioFunction.parse(gadget.metadata["f"])} if gadget.kind == RM_ELEM_WEIGHTED else {}
        out = wrapper_transfer(gadget.source, gadget.kind, exact_reopt_solver, **kw)
        rec.check("exact_transfer", out.value == src_opt, f"transfer {out.value} vs OPT {src_opt}")
        rec.stats["transfer"] = out.value


def _bullets(cg: ChainGadget, rec: TrialRecord, k_max: int) -> None:
    chain = cg.chain
    src_opt = solve_exact(cg.source).value
    opts = [solve_exact(inst).value for inst in chain.instances]
    rec.src_opt, rec.old_opt, rec.new_opt = src_opt, opts[0], opts[-1]
    try:
        chain.check()
        rec.check("bullet3_steps", True)
    except Exception as exc:  # noqa: BLE001 - recorded as witness
        rec.check("bullet3_steps", False, str(exc))
    start = chain.start_solution
    rec.check("bullet2_start_optimal", start is not None and start.value == opts[0])
    for inst, opt in zip(chain.instances, opts):
        rec.check("greedy_bound_chain", greedy_within_bound(inst, opt))
    for k in range(k_max + 1):
        fk = chain.bound(k)
        if src_opt <= k:
            rec.check("bullet1_bounded", max(opts) <= fk, f"k={k}: max OPT(I_i) {max(opts)} > f(k) {fk}")
        # final threshold: OPT(I_n) <= t(k) iff OPT(src) <= k
        rec.check("bullet4_final", (opts[-1] <= chain.final(k)) == (src_opt <= k), f"k={k}")
        run = eptas_fpt_driver(chain, exact_routine, k)
        rec.check("driver", run.within_k == (src_opt <= k), f"k={k}: driver {run.within_k}, OPT {src_opt}")
        if run.solution is not None:
            rec.check("driver_solution", run.solution.value == opts[-1])


def _draw_gadget_source(rng: SplitMix64, spec: GenSpec, kind: str) -> Instance:
    weighted = spec.weight_range if kind == RM_ELEM_WEIGHTED else None
    sub = GenSpec(spec.seed, spec.n_elements, spec.n_sets, spec.density, weighted, spec.weight_steps, spec.strict)
    for _ in range(1000):
        n = rng.between(max(1, (spec.n_elements + 1) // 2), spec.n_elements)
        m = rng.between(max(1, (spec.n_sets + 1) // 2), spec.n_sets)
        src = draw_instance(rng, sub.scaled(n, m))
        try:
            if kind in (ADD_SET_UNWEIGHTED, ADD_SET_WEIGHTED, REMOVE_SET, REMOVE_SET_WEIGHTED):
                build_gadget(kind, src)
            return src
        except PreconditionError:
            continue
    raise PreconditionError(f"could not draw a source meeting the {kind} preconditions")


def _trial(kind: str, spec: GenSpec, trial: int, mutate: Callable[[Gadget], Gadget] | None) -> TrialRecord:
    seed = (spec.seed + trial) & MASK64
    rec = TrialRecord(kind, trial, seed)
    rng = SplitMix64(seed)
    if kind == RM_ELEM_CHAIN:
        g = draw_graph(rng, rng.between(max(1, (spec.n_elements + 1) // 2), spec.n_elements), spec.density)
        base = domset_instance(g)
        best = solve_exact(base)
        extra = [v for v in g.vertices if v not in best.chosen]
        approx = set(best.chosen) | set(rng.sample(extra, rng.below(len(best.chosen) + 1)))
        cg = chain_remove_element(g, approx)
        rec.relation = "OPT(I_i) <= 2k; OPT(I_n) = OPT(src)"
        _bullets(cg, rec, len(g.vertices))
        return rec
    src = _draw_gadget_source(rng, spec, kind)
    if kind == ADD_ELEM_CHAIN:
        cg = chain_add_element(src)
        rec.relation = "OPT(I_i) <= OPT(src) + 1 = OPT(I_n)"
        _bullets(cg, rec, len(src.universe))
        rec.check("final_relation", rec.new_opt == rec.src_opt + 1)
        return rec
    if kind == REPAIR:
        _repair_trial(rng, spec, rec)
        return rec
    if kind == PTAS:
        _ptas_trial(rng, src, rec)
        return rec
    if kind == ADD_ELEM_WEIGHTED:
        prep = preprocess_singletons(src)
        if not prep.reduced.universe:
            rec.relation = "preprocessing solved the source"
            out = wrapper_transfer(src, kind, exact_reopt_solver)
            rec.src_opt = solve_exact(src).value
            rec.check("exact_transfer", out.value == rec.src_opt)
            return rec
        guess = int(solve_exact(prep.reduced).value)
        gadget = build_gadget(kind, src, guess=guess)
    elif kind == RM_ELEM_WEIGHTED:
        gadget = build_gadget(kind, src, f=RatioFunction.const(1))
    else:
        gadget = build_gadget(kind, src)
    if mutate is not None:
        gadget = mutate(gadget)
    certify_gadget(gadget, rec)
    if kind == ADD_ELEM_WEIGHTED:
        rec.check("two_approx", rec.stats["transfer"] <= 2 * rec.src_opt)
    return rec


def _repair_trial(rng: SplitMix64, spec: GenSpec, rec: TrialRecord) -> None:
    """Weighted element addition, optimal and 3/2-quality old solutions."""
    weights = spec.weight_range or (Fraction(0), Fraction(2))
    sub = GenSpec(spec.seed, spec.n_elements, spec.n_sets, spec.density, weights, spec.weight_steps)
    old = draw_instance(rng, sub.scaled(rng.between(1, spec.n_elements), rng.between(1, spec.n_sets)))
    into = rng.sample(list(old.names), 1 + rng.below(min(3, len(old.names))))
    mod = AddElement("_enew", frozenset(into))
    rec.relation = "repair <= (1 + rho) OPT(new)"
    opt_old = solve_exact(old)
    new_opt = solve_exact(make_reopt(old, opt_old, 1, mod, check_quality=False).new).value
    rec.src_opt, rec.old_opt, rec.new_opt = opt_old.value, opt_old.value, new_opt
    degraded = worsen_within(old, opt_old, Fraction(3, 2) * opt_old.value)
    rec.stats["degraded"] = Fraction(degraded.value > opt_old.value)
    for rho, sol in ((ONE, opt_old), (Fraction(3, 2), degraded)):
        r = make_reopt(old, sol, rho, mod)
        if rho == ONE:
            rec.check("greedy_bound_old", greedy_within_bound(r.old, opt_old.value))
            rec.check("greedy_bound_new", greedy_within_bound(r.new, new_opt))
        out = repair_add_element(r)
        rec.check(f"repair_cover_rho{rho}", is_cover(r.new, out))
        rec.check(f"repair_ratio_rho{rho}", out.value <= (1 + rho) * new_opt, f"{out.value} > {(1 + rho) * new_opt}")
        rec.check(f"repair_additive_rho{rho}", out.value <= sol.value + max(s.weight for s in r.new.family))
        rec.stats[f"ratio_rho{format_rational(rho)}"] = out.value / new_opt if new_opt else ZERO


PTAS_EPSILONS = (Fraction(1), Fraction(1, 2), Fraction(1, 4))


def _ptas_trial(rng: SplitMix64, src: Instance, rec: TrialRecord) -> None:
    rec.relation = "ptas <= (1 + eps) OPT(new)"
    opt_old = solve_exact(src)
    rec.src_opt = rec.old_opt = opt_old.value
    if rng.below(2) == 0 or len(src.universe) < 2:
        into = rng.sample(list(src.names), 1 + rng.below(min(3, len(src.names))))
        mod = AddElement("_enew", frozenset(into))
    else:
        mod = RemoveElement(src.universe[rng.below(len(src.universe))])
    r = make_reopt(src, opt_old, 1, mod)
    new_opt = solve_exact(r.new).value
    rec.new_opt = new_opt
    rec.check("greedy_bound_old", greedy_within_bound(src, opt_old.value))
    rec.check("greedy_bound_new", greedy_within_bound(r.new, new_opt))
    for eps in PTAS_EPSILONS:
        out = ptas_case_distinction(r, eps)
        tag = format_rational(eps)
        rec.check(f"ptas_cover_eps{tag}", is_cover(r.new, out))
        rec.check(f"ptas_ratio_eps{tag}", out.value <= (1 + eps) * new_opt, f"{out.value} vs OPT {new_opt}")


def worsen_within(inst: Instance, sol: Solution, budget: Fraction, avoid: Iterable[str] = ()) -> Solution:
    """Deterministically degrade a cover while its value stays <= budget.

    Repeatedly replaces one chosen set by the sets a greedy pass picks to
    re-cover the elements only it covered, taking the first replacement
    (in name order) that strictly raises the value without exceeding
    ``budget``. Finally pads with redundant positive-weight sets, in name
    order, while the budget allows. Sets in ``avoid`` are never added.
    """
    avoid = frozenset(avoid)
    sol = restrict(inst, sol)
    improved = True
    while improved:
        improved = False
        for name in sol.names:
            rest = sol.chosen - {name}
            covered = set().union(*(inst.extent(n) for n in rest)) if rest else set()
            missing = set(inst.universe) - covered
            pool = [s for s in inst.family if s.name not in sol.chosen and s.name not in avoid]
            add = []
            while missing:
                best = min(
                    (s for s in pool if s.extent & missing),
                    key=lambda s: (s.weight / len(s.extent & missing), s.name),
                    default=None,
                )
                if best is None:
                    break
                add.append(best.name)
                pool.remove(best)
                missing -= best.extent
            if missing:
                continue
            cand = inst.solution(rest | set(add))
            if sol.value < cand.value <= budget:
                sol = cand
                improved = True
                break
    for s in inst.family:
        if s.name not in sol.chosen and s.name not in avoid and 0 < s.weight <= budget - sol.value:
            sol = inst.solution(sol.chosen | {s.name})
    return sol


def certify(
    kind: str,
    spec: GenSpec,
    trials: int,
    *,
    mutate: Callable[[Gadget], Gadget] | None = None,
    time_limit: float | None = None,
) -> Report:
    """Run ``trials`` oracle-checked trials of ``kind``; trial t uses seed spec.seed + t.

    ``time_limit`` bounds each trial's wall clock; a trial whose oracle
    runs out of time is inconclusive, never a pass.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    records = []
    for t in range(trials):
        start = time.perf_counter()
        try:
            with warnings.catch_warnings():
                # duplicate extents are legal in non-strict mode; trials expect them
                warnings.simplefilter("ignore", DuplicateExtentWarning)
                rec = _trial(kind, spec, t, mutate)
        except OracleLimitError as exc:
            rec = TrialRecord(kind, t, (spec.seed + t) & MASK64, status="inconclusive", detail=str(exc))
        rec.elapsed = time.perf_counter() - start
        if time_limit is not None and rec.elapsed > time_limit and rec.passed:
            rec.status = "inconclusive"
            rec.detail = "time limit exceeded"
        records.append(rec)
    return Report(kind, spec, records)


DEFAULT_SPECS = {
    ADD_SET_UNWEIGHTED: GenSpec(seed=1, n_elements=10, n_sets=12, density=Fraction(3, 10)),
    ADD_SET_WEIGHTED: GenSpec(seed=2, n_elements=10, n_sets=12, density=Fraction(3, 10)),
    REMOVE_SET: GenSpec(seed=3, n_elements=10, n_sets=12, density=Fraction(3, 10)),
    REMOVE_SET_WEIGHTED: GenSpec(seed=4, n_elements=10, n_sets=12, density=Fraction(3, 10)),
    RM_ELEM_WEIGHTED: GenSpec(
        seed=5, n_elements=10, n_sets=12, density=Fraction(3, 10), weight_range=(Fraction(0), Fraction(3))
    ),
    ADD_ELEM_WEIGHTED: GenSpec(seed=6, n_elements=10, n_sets=12, density=Fraction(3, 10)),
    ADD_ELEM_CHAIN: GenSpec(seed=7, n_elements=8, n_sets=8, density=Fraction(3, 10)),
    RM_ELEM_CHAIN: GenSpec(seed=8, n_elements=8, n_sets=8, density=Fraction(3, 10)),
    REPAIR: GenSpec(
        seed=9, n_elements=10, n_sets=12, density=Fraction(3, 10), weight_range=(Fraction(0), Fraction(2))
    ),
    PTAS: GenSpec(seed=10, n_elements=12, n_sets=12, density=Fraction(1, 4)),
}

DEFAULT_TRIALS = {
    ADD_SET_UNWEIGHTED: 200,
    ADD_SET_WEIGHTED: 200,
    REMOVE_SET: 200,
    REMOVE_SET_WEIGHTED: 200,
    RM_ELEM_WEIGHTED: 200,
    ADD_ELEM_WEIGHTED: 100,
    ADD_ELEM_CHAIN: 100,
    RM_ELEM_CHAIN: 100,
    REPAIR: 200,
    PTAS: 200,
}


def run_default_suite(trials_scale: Fraction = ONE) -> dict[str, Report]:
    return {
        kind: certify(kind, DEFAULT_SPECS[kind], max(1, int(DEFAULT_TRIALS[kind] * trials_scale)))
        for kind in KINDS
    }


def all_instances_valid(instances: Iterable[Instance]) -> bool:
    return all(validate(inst) is None for inst in instances)


def worsening_reopt_solver(ratio: Fraction, avoid: Iterable[str] = ()) -> Callable:
    """A ``ratio``-approximate reoptimization solver that is as bad as
    ``worsen_within`` can make it: starts from the exact optimum and degrades
    it while staying within ``ratio`` * OPT(new), never adding ``avoid`` sets.
    If the optimum already uses an avoided set it is returned unchanged."""
    ratio = Fraction(ratio)
    avoid = frozenset(avoid)

    def solver(r) -> Solution:
        best = solve_exact(r.new)
        if best.chosen & avoid:
            return best
        return worsen_within(r.new, best, ratio * best.value, avoid)

    return solver


def pairs_and_singletons(n_pairs: int) -> Instance:
    """2n elements, n disjoint pair sets and all 2n singletons: OPT = n, and
    the all-singletons cover costs exactly 2 * OPT."""
    elements = _names("u", 2 * n_pairs)
    family = [NamedSet(f"P{i + 1:02d}", {elements[2 * i], elements[2 * i + 1]}) for i in range(n_pairs)]
    family += [NamedSet(f"T{e[1:]}", {e}) for e in elements]
    return Instance(tuple(elements), tuple(family))


def reweight(set_name: str, weight: Fraction) -> Callable[[Gadget], Gadget]:
    """Negative control: a mutation that changes one set's weight in both
    gadget instances while keeping the gadget's claims unchanged."""
    weight = Fraction(weight)

    def mutate(g: Gadget) -> Gadget:
        def bump(inst: Instance) -> Instance:
            return inst.replace_family(
                NamedSet(s.name, s.extent, weight) if s.name == set_name else s for s in inst.family
            )

        r = g.reopt
        old = bump(r.old)
        reopt = make_reopt(old, r.old_solution.chosen, r.rho, r.mod, check_quality=False)
        return replace(g, reopt=reopt)

    return mutate
