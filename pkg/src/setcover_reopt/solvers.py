"""Exact, bounded-depth and greedy solvers for (weighted) set cover.

The exact solver is a branch-and-bound over bitmasks. Ties between optimal
covers are broken by fewest sets, then by the lexicographically least
sorted tuple of set names, so ``solve_exact`` is a pure function of the
instance.
"""

from __future__ import annotations

import math
import time
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ZERO,
    InfeasibleInstanceError,
    Instance,
    PreconditionError,
    SetCoverError,
    Solution,
)

# |family| up to which callers may treat the exact solver as a cheap oracle
ORACLE_MAX_SETS = 26


class OracleLimitError(SetCoverError):
    """The exact search exceeded its time or size budget."""


@dataclass(frozen=True)
class SolveBudget:
    mode: str = "exact"  # exact | bounded | greedy
    k: int | None = None
    time_limit: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "bounded", "greedy"):
            raise ValueError(f"unknown solve mode {self.mode!r}")
        if self.mode == "bounded" and (self.k is None or self.k < 0):
            raise ValueError("bounded mode requires k >= 0")


def solve(inst: Instance, budget: SolveBudget) -> Solution | None:
    if budget.mode == "greedy":
        return greedy(inst)
    if budget.mode == "bounded":
        return decide_bounded(inst, budget.k, time_limit=budget.time_limit)
    return solve_exact(inst, time_limit=budget.time_limit)


def harmonic(d: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, d + 1)), ZERO)


class _Deadline:
    __slots__ = ("at", "ticks")

    def __init__(self, seconds: float | None):
        self.at = None if seconds is None else time.monotonic() + seconds
        self.ticks = 0

    def tick(self) -> None:
        self.ticks += 1
        if self.at is not None and self.ticks % 256 == 0 and time.monotonic() > self.at:
            raise OracleLimitError("time limit exceeded")


def _bits(x: int) -> Iterable[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _masks(inst: Instance) -> tuple[int, list[int]]:
    pos = {e: i for i, e in enumerate(inst.universe)}
    masks = []
    for s in inst.family:
        m = 0
        for e in s.extent:
            m |= 1 << pos[e]
        masks.append(m)
    return (1 << len(inst.universe)) - 1, masks


def _integer_weights(inst: Instance) -> list[int]:
    den = math.lcm(*(s.weight.denominator for s in inst.family)) if inst.family else 1
    return [int(s.weight * den) for s in inst.family]


def _require_feasible(full: int, masks: list[int], inst: Instance) -> None:
    covered = 0
    for m in masks:
        covered |= m
    if covered & full != full:
        missing = next(_bits(full & ~covered))
        raise InfeasibleInstanceError(f"element {inst.universe[missing]} uncovered")


def _tiebreak_costs(weights: list[int]) -> list[int]:
    # cost_i = 2^m * ((m+1) * w_i + 1) - 2^(m-1-i): every cost is positive and
    # minimizing the sum orders covers by (weight, |cover|, name tuple).
    m = len(weights)
    return [(1 << m) * ((m + 1) * w + 1) - (1 << (m - 1 - i)) for i, w in enumerate(weights)]


def _branch_and_bound(full: int, masks: list[int], costs: list[int], deadline: _Deadline) -> int:
    """Return the index bitmask of the unique min-cost cover."""
    n = full.bit_length()
    covers = [[i for i, m in enumerate(masks) if m >> e & 1] for e in range(n)]
    best_cost, best_sel = _greedy_upper_bound(full, masks, costs)

    def rec(covered: int, cost: int, sel: int, allowed: int) -> None:
        nonlocal best_cost, best_sel
        deadline.tick()
        if covered == full:
            if cost < best_cost:
                best_cost, best_sel = cost, sel
            return
        unc = full & ~covered
        lb = 0.0
        pick: list[int] | None = None
        for e in _bits(unc):
            cands = [i for i in covers[e] if allowed >> i & 1]
            if not cands:
                return
            lb += min(costs[i] / (masks[i] & unc).bit_count() for i in cands)
            if pick is None or len(cands) < len(pick):
                pick = cands
        if lb * (1 - 1e-9) >= best_cost - cost:
            return
        pick.sort(key=lambda i: (costs[i] / (masks[i] & unc).bit_count(), i))
        for i in pick:
            rec(covered | masks[i], cost + costs[i], sel | 1 << i, allowed)
            allowed &= ~(1 << i)

    rec(0, 0, 0, (1 << len(masks)) - 1)
    return best_sel


def _greedy_upper_bound(full: int, masks: list[int], costs: list[int]) -> tuple[int, int]:
    covered, cost, sel = 0, 0, 0
    while covered != full:
        unc = full & ~covered
        i = min(
            (i for i, m in enumerate(masks) if m & unc),
            key=lambda i: (costs[i] / (masks[i] & unc).bit_count(), i),
        )
        covered |= masks[i]
        cost += costs[i]
        sel |= 1 << i
    # + 1 so the greedy cover itself is accepted by the strict improvement test
    return cost + 1, sel


def solve_exact(
    inst: Instance,
    *,
    time_limit: float | None = None,
    exclude: Iterable[str] = (),
    max_sets: int | None = None,
) -> Solution:
    """Minimum-value cover of ``inst``.

    Among optimal covers the one with fewest sets wins, then the
    lexicographically least sorted tuple of names. ``exclude`` names sets
    that may not be used.
    """
    if max_sets is not None and len(inst.family) > max_sets:
        raise OracleLimitError(f"{len(inst.family)} sets exceeds oracle limit {max_sets}")
    full, masks = _masks(inst)
    excluded = set(exclude)
    masks = [0 if s.name in excluded else m for s, m in zip(inst.family, masks)]
    _require_feasible(full, masks, inst)
    costs = _tiebreak_costs(_integer_weights(inst))
    sel = _branch_and_bound(full, masks, costs, _Deadline(time_limit))
    return inst.solution(inst.family[i].name for i in _bits(sel))


def optimum(inst: Instance, **kwargs) -> Fraction:
    return solve_exact(inst, **kwargs).value


def enumerate_optima(inst: Instance, *, time_limit: float | None = None) -> list[Solution]:
    """All covers of minimum value, in lexicographic order of name tuples.

    Covers padded with zero-weight sets are optimal too and are included.
    """
    full, masks = _masks(inst)
    _require_feasible(full, masks, inst)
    weights = _integer_weights(inst)
    best = _branch_and_bound(full, masks, _tiebreak_costs(weights), _Deadline(time_limit))
    target = sum(weights[i] for i in _bits(best))
    deadline = _Deadline(time_limit)
    m = len(masks)
    # suffix[i] = union of masks[i:]
    suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] | masks[i]
    found: list[int] = []

    def lower_bound(unc: int, start: int) -> float:
        lb = 0.0
        for e in _bits(unc):
            lb += min(
                weights[i] / (masks[i] & unc).bit_count()
                for i in range(start, m)
                if masks[i] >> e & 1
            )
        return lb

    def rec(i: int, covered: int, cost: int, sel: int) -> None:
        deadline.tick()
        if cost > target:
            return
        unc = full & ~covered
        if i == m:
            if not unc and cost == target:
                found.append(sel)
            return
        if unc & ~suffix[i]:
            return
        if unc and lower_bound(unc, i) * (1 - 1e-9) > target - cost:
            return
        rec(i + 1, covered | masks[i], cost + weights[i], sel | 1 << i)
        rec(i + 1, covered, cost, sel)

    rec(0, 0, 0, 0)
    sols = [inst.solution(inst.family[i].name for i in _bits(sel)) for sel in found]
    return sorted(sols, key=lambda s: s.names)


def decide_bounded(inst: Instance, k: int, *, time_limit: float | None = None) -> Solution | None:
    """Optimal cover if OPT <= k, else None (unweighted instances only).

    Iterative deepening over a search tree that branches on an uncovered
    element with the fewest covering sets, trying every set containing it;
    the tree has depth at most k, so the running time is |family|^k * poly.
    """
    if inst.weighted:
        raise PreconditionError("bounded search needs an unweighted instance")
    if k < 0:
        raise ValueError("k must be non-negative")
    full, masks = _masks(inst)
    _require_feasible(full, masks, inst)
    n = full.bit_length()
    covers = [[i for i, m in enumerate(masks) if m >> e & 1] for e in range(n)]
    deadline = _Deadline(time_limit)

    def rec(covered: int, sel: int, depth: int) -> int | None:
        deadline.tick()
        if covered == full:
            return sel
        if depth == 0:
            return None
        unc = full & ~covered
        widest = max((masks[i] & unc).bit_count() for i in range(len(masks)))
        if widest * depth < unc.bit_count():
            return None
        pick = min((covers[e] for e in _bits(unc)), key=len)
        for i in pick:
            found = rec(covered | masks[i], sel | 1 << i, depth - 1)
            if found is not None:
                return found
        return None

    for depth in range(k + 1):
        sel = rec(0, 0, depth)
        if sel is not None:
            return inst.solution(inst.family[i].name for i in _bits(sel))
    return None


def greedy(inst: Instance) -> Solution:
    """Chvatal's greedy rule: repeatedly take the set of least weight per
    newly covered element, ties broken by the least set name.

    Zero-weight sets that cover something new have ratio 0 and are taken
    before any other set.
    """
    uncovered = set(inst.universe)
    chosen: list[str] = []
    while uncovered:
        best = None
        for s in inst.family:
            gain = len(s.extent & uncovered)
            if gain == 0:
                continue
            key = (s.weight / gain, s.name)
            if best is None or key < best:
                best = key
        if best is None:
            raise InfeasibleInstanceError(f"element {min(uncovered)} uncovered")
        name = best[1]
        chosen.append(name)
        uncovered -= inst[name].extent
    return inst.solution(chosen)
