"""Reoptimization algorithms: repair for element addition, the
small-or-large case distinction scheme for unweighted element changes, and
the driver that turns a reoptimization scheme into a parameterized decision
procedure along an instance chain."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    ONE,
    InfeasibleSolutionError,
    Instance,
    PreconditionError,
    RatioFunction,
    SetCoverError,
    Solution,
    is_cover,
    restrict,
)
from .modifications import (
    AddElement,
    Modification,
    RemoveElement,
    ReoptInstance,
    apply,
    diff,
    make_reopt,
)
from .solvers import decide_bounded, solve_exact

# (old instance, old solution, new instance, accuracy) -> solution of new
ReoptRoutine = Callable[[Instance, Solution, Instance, Fraction], Solution]


class ChainError(SetCoverError):
    pass


def repair_add_element(r: ReoptInstance) -> Solution:
    """Keep the old solution; if the new element is uncovered, add the
    cheapest set containing it (least name on ties).

    value <= value(old) + min weight of a set containing e, which is at
    most (1 + rho) * OPT(new).
    """
    if not isinstance(r.mod, AddElement):
        raise PreconditionError("repair needs an add-element modification")
    sol = restrict(r.new, r.old_solution)
    e = r.mod.element
    if any(e in r.new[name].extent for name in sol.chosen):
        return sol
    cheapest = min(r.new.covering(e), key=lambda n: (r.new.weight(n), n))
    return r.new.solution(sol.chosen | {cheapest})


def case_threshold(eps: Fraction) -> int:
    return math.ceil(1 / eps) + 1


def ptas_case_distinction(r: ReoptInstance, eps: Fraction | int | str) -> Solution:
    """(1 + eps)-approximation for unweighted element addition/removal
    with an optimal old solution.

    With T = ceil(1/eps) + 1: if the old optimum is at most T, the new
    optimum is at most T + 1 and bounded search finds it exactly. Otherwise
    the optimum moved by at most one, so repairing (addition) or keeping
    (removal) the old solution is within 1 + 1/T of optimal.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if r.old.weighted or r.new.weighted:
        raise PreconditionError("case distinction needs unweighted instances")
    if r.rho != ONE:
        raise PreconditionError("case distinction needs an optimal old solution (rho = 1)")
    if not isinstance(r.mod, AddElement | RemoveElement):
        raise PreconditionError("case distinction handles element addition/removal only")
    t = case_threshold(eps)
    if r.old_solution.value <= t:
        sol = decide_bounded(r.new, t + 1)
        if sol is None:
            raise InfeasibleSolutionError("bounded search failed; old solution was not optimal")
        return sol
    if isinstance(r.mod, AddElement):
        return repair_add_element(r)
    return restrict(r.new, r.old_solution)


def exact_routine(old: Instance, old_solution: Solution, new: Instance, eps: Fraction) -> Solution:
    """Stand-in for a reoptimization scheme: ignores the hint, solves exactly."""
    return solve_exact(new)


def ptas_routine(old: Instance, old_solution: Solution, new: Instance, eps: Fraction) -> Solution:
    r = make_reopt(old, old_solution, 1, diff(old, new), check_quality=False)
    return ptas_case_distinction(r, eps)


@dataclass(frozen=True)
class InstanceChain:
    """I_0, ..., I_n with I_i = apply(I_{i-1}, mods[i-1]).

    ``bound`` is f: the promised bound on every OPT(I_i) when the source
    optimum is at most k. ``final_bound`` is the threshold t(k) with
    OPT(I_n) <= t(k) iff OPT(source) <= k; it defaults to ``bound``.
    ``start_solution`` is an optimal solution of I_0, or None when I_0 is
    known to exceed every bound.
    """

    instances: tuple[Instance, ...]
    mods: tuple[Modification, ...]
    start_solution: Solution | None
    bound: RatioFunction
    final_bound: RatioFunction | None = None

    def __post_init__(self) -> None:
        if len(self.instances) != len(self.mods) + 1:
            raise ChainError("chain needs exactly one modification per step")

    def final(self, k: int) -> Fraction:
        return (self.final_bound or self.bound)(k)

    def __len__(self) -> int:
        return len(self.mods)

    def check(self) -> None:
        """Raise ChainError unless every step is exactly one modification."""
        for i, mod in enumerate(self.mods, 1):
            try:
                step = apply(self.instances[i - 1], mod)
            except SetCoverError as exc:
                raise ChainError(f"step {i}: {exc}") from None
            if step != self.instances[i]:
                raise ChainError(f"step {i}: modification does not produce the next instance")


@dataclass
class DriverRun:
    solution: Solution | None
    k: int
    steps: int
    values: list[Fraction] = field(default_factory=list)

    @property
    def within_k(self) -> bool:
        return self.solution is not None


def eptas_fpt_driver(chain: InstanceChain, approx: ReoptRoutine, k: int) -> DriverRun:
    """Decide OPT(source) <= k by walking the chain with ``approx``.

    Uses accuracy 1/(f(k) + 1), so a (1 + eps)-accurate routine is exact at
    every step whose optimum is at most f(k). Returns the final solution
    when its value is within the chain's final threshold, else a run
    without solution.
    """
    fk = chain.bound(k)
    start = chain.start_solution
    if start is None or start.value > fk:
        return DriverRun(None, k, 0)
    eps = 1 / (fk + 1)
    sol = start
    values = [sol.value]
    for i in range(1, len(chain.instances)):
        prev, cur = chain.instances[i - 1], chain.instances[i]
        sol = approx(prev, sol, cur, eps)
        if not is_cover(cur, sol):
            raise InfeasibleSolutionError(f"routine returned a non-cover at step {i}")
        sol = restrict(cur, sol)
        if sol.value.denominator != 1:
            raise PreconditionError("driver needs integral solution values")
        values.append(sol.value)
        if sol.value > fk:
            # with OPT(source) <= k every step stays optimal and within f(k)
            return DriverRun(None, k, i, values)
    if sol.value <= chain.final(k):
        return DriverRun(sol, k, len(chain), values)
    return DriverRun(None, k, len(chain), values)


def chain_from(instances: Sequence[Instance], start_solution: Solution | None, bound: RatioFunction,
               final_bound: RatioFunction | None = None) -> InstanceChain:
    """Build a chain, recovering each step's modification from consecutive instances."""
    mods = tuple(diff(a, b) for a, b in zip(instances, instances[1:]))
    return InstanceChain(tuple(instances), mods, start_solution, bound, final_bound)
