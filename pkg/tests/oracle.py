"""Brute-force reference solver, deliberately independent of the package's
branch and bound: it enumerates every subfamily."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from setcover_reopt.core import Instance


def all_covers(inst: Instance):
    universe = set(inst.universe)
    names = inst.names
    for r in range(len(names) + 1):
        for combo in combinations(names, r):
            covered = set()
            for n in combo:
                covered |= inst.extent(n)
            if covered >= universe:
                yield combo, sum((inst.weight(n) for n in combo), Fraction(0))


def brute_opt(inst: Instance) -> Fraction:
    return min(v for _, v in all_covers(inst))


def brute_best(inst: Instance) -> tuple[str, ...]:
    """Least cover by (value, size, sorted name tuple)."""
    return min(all_covers(inst), key=lambda cv: (cv[1], len(cv[0]), cv[0]))[0]


def brute_optima(inst: Instance) -> list[tuple[str, ...]]:
    covers = list(all_covers(inst))
    best = min(v for _, v in covers)
    return sorted(c for c, v in covers if v == best)
