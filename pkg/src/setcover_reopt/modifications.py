"""The four local modifications (add/remove a set, add/remove an element)
and the reoptimization triple built from them."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    ONE,
    FormatError,
    InfeasibleSolutionError,
    Instance,
    NamedSet,
    PreconditionError,
    SetCoverError,
    Solution,
    check_valid,
    format_rational,
    is_cover,
    is_token,
    parse_rational,
    restrict,
)
from .solvers import ORACLE_MAX_SETS, OracleLimitError, solve_exact


class QualityRefutedError(SetCoverError):
    """The oracle shows the given old solution is worse than rho * OPT."""


@dataclass(frozen=True)
class AddSet:
    name: str
    extent: frozenset[str]
    weight: Fraction = ONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "extent", frozenset(self.extent))
        object.__setattr__(self, "weight", Fraction(self.weight))


@dataclass(frozen=True)
class RemoveSet:
    name: str


@dataclass(frozen=True)
class AddElement:
    element: str
    into: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "into", frozenset(self.into))


@dataclass(frozen=True)
class RemoveElement:
    element: str


Modification = AddSet | RemoveSet | AddElement | RemoveElement


def apply(inst: Instance, mod: Modification, *, strict: bool = False) -> Instance:
    """Return the modified instance; set names and weights are stable.

    Raises PreconditionError when ``mod`` does not apply to ``inst`` and
    InfeasibleInstanceError when the result would leave an element
    uncovered.
    """
    match mod:
        case AddSet(name, extent, weight):
            if not is_token(name) or name in inst:
                raise PreconditionError(f"add-set: name {name!r} invalid or already used")
            if not extent <= set(inst.universe):
                raise PreconditionError(f"add-set: extent of {name} not within the universe")
            for s in inst.family:
                if s.extent == extent:
                    raise PreconditionError(f"add-set: extent of {name} duplicates set {s.name}")
            if not inst.weighted and weight != ONE:
                raise PreconditionError("add-set: unweighted instance needs weight 1")
            out = inst.replace_family((*inst.family, NamedSet(name, extent, weight)))
        case RemoveSet(name):
            if name not in inst:
                raise PreconditionError(f"rm-set: no set named {name!r}")
            out = inst.replace_family(s for s in inst.family if s.name != name)
        case AddElement(e, into):
            if not is_token(e) or e in inst.universe:
                raise PreconditionError(f"add-elem: {e!r} invalid or already in the universe")
            if not into:
                raise PreconditionError(f"add-elem: {e} must go into at least one set")
            missing = sorted(n for n in into if n not in inst)
            if missing:
                raise PreconditionError(f"add-elem: no set named {missing[0]!r}")
            family = (
                NamedSet(s.name, s.extent | {e}, s.weight) if s.name in into else s
                for s in inst.family
            )
            out = inst.replace_family(family, (*inst.universe, e))
        case RemoveElement(e):
            if e not in inst.universe:
                raise PreconditionError(f"rm-elem: {e} not in the universe")
            family = (NamedSet(s.name, s.extent - {e}, s.weight) for s in inst.family)
            out = inst.replace_family(family, (u for u in inst.universe if u != e))
        case _:
            raise TypeError(f"not a modification: {mod!r}")
    return check_valid(out, strict)


def inverse(mod: Modification, ctx: Instance) -> Modification:
    """The modification that undoes ``mod`` applied to ``ctx``."""
    match mod:
        case AddSet(name):
            return RemoveSet(name)
        case RemoveSet(name):
            s = ctx[name]
            return AddSet(name, s.extent, s.weight)
        case AddElement(e):
            return RemoveElement(e)
        case RemoveElement(e):
            into = ctx.covering(e)
            if not into:
                raise PreconditionError(f"rm-elem: {e} is not covered in the context instance")
            return AddElement(e, frozenset(into))
    raise TypeError(f"not a modification: {mod!r}")


def diff(old: Instance, new: Instance) -> Modification:
    """Recover the single modification turning ``old`` into ``new``."""
    added_e = set(new.universe) - set(old.universe)
    removed_e = set(old.universe) - set(new.universe)
    added_s = set(new.names) - set(old.names)
    removed_s = set(old.names) - set(new.names)
    mod: Modification | None = None
    if len(added_e) == 1 and not removed_e:
        e = added_e.pop()
        mod = AddElement(e, frozenset(new.covering(e)))
    elif len(removed_e) == 1 and not added_e:
        mod = RemoveElement(removed_e.pop())
    elif not added_e and not removed_e:
        if len(added_s) == 1 and not removed_s:
            s = new[added_s.pop()]
            mod = AddSet(s.name, s.extent, s.weight)
        elif len(removed_s) == 1 and not added_s:
            mod = RemoveSet(removed_s.pop())
    if mod is not None:
        try:
            if apply(old, mod) == new:
                return mod
        except SetCoverError:
            pass
    raise PreconditionError("instances are not related by a single modification")


@dataclass(frozen=True)
class ReoptInstance:
    """(old instance, rho-quality old solution, modified instance)."""

    old: Instance
    old_solution: Solution
    rho: Fraction
    mod: Modification
    new: Instance
    quality_verified: bool = field(default=False, compare=False)


def make_reopt(
    old: Instance,
    sol: Solution | Iterable[str],
    rho: Fraction | int | str,
    mod: Modification,
    *,
    strict: bool = False,
    check_quality: bool = True,
    time_limit: float | None = 5.0,
) -> ReoptInstance:
    """Assemble a reoptimization instance.

    The quality promise value(sol) <= rho * OPT(old) is checked with the
    exact solver when the old instance is small enough; otherwise (or with
    ``check_quality=False``) it is kept as an unverified claim.
    """
    rho = parse_rational(rho) if isinstance(rho, str) else Fraction(rho)
    if rho < 1:
        raise PreconditionError(f"rho must be >= 1, got {format_rational(rho)}")
    sol = restrict(old, sol)
    if not is_cover(old, sol):
        raise InfeasibleSolutionError("old solution does not cover the old instance")
    new = apply(old, mod, strict=strict)
    verified = False
    if check_quality and len(old.family) <= ORACLE_MAX_SETS:
        try:
            opt = solve_exact(old, time_limit=time_limit).value
        except OracleLimitError:
            opt = None
        if opt is not None:
            if sol.value > rho * opt:
                raise QualityRefutedError(
                    f"old solution value {format_rational(sol.value)} exceeds "
                    f"rho * OPT = {format_rational(rho * opt)}"
                )
            verified = True
    return ReoptInstance(old, sol, rho, mod, new, verified)


# text format


def format_modification(mod: Modification, weighted: bool = True) -> str:
    match mod:
        case AddSet(name, extent, weight):
            w = f" w={format_rational(weight)}" if weighted or weight != ONE else ""
            return " ".join([f"add-set {name}{w}:", *sorted(extent)]) + "\n"
        case RemoveSet(name):
            return f"rm-set {name}\n"
        case AddElement(e, into):
            return " ".join([f"add-elem {e} into:", *sorted(into)]) + "\n"
        case RemoveElement(e):
            return f"rm-elem {e}\n"
    raise TypeError(f"not a modification: {mod!r}")


def parse_modification(text: str) -> Modification:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) != 1:
        raise FormatError(f"expected exactly one modification line, got {len(lines)}")
    line = lines[0]
    head, sep, rest = line.partition(":")
    words = head.split()
    if not words:
        raise FormatError(f"empty modification {line!r}")
    op = words[0]
    if op == "add-set" and sep and len(words) in (2, 3):
        weight = ONE
        if len(words) == 3:
            if not words[2].startswith("w="):
                raise FormatError(f"expected w=<rational> in {line!r}")
            weight = parse_rational(words[2][2:])
        return AddSet(words[1], frozenset(rest.split()), weight)
    if op == "add-elem" and sep and len(words) == 3 and words[2] == "into":
        return AddElement(words[1], frozenset(rest.split()))
    if op == "rm-set" and not sep and len(words) == 2:
        return RemoveSet(words[1])
    if op == "rm-elem" and not sep and len(words) == 2:
        return RemoveElement(words[1])
    raise FormatError(f"unrecognized modification {line!r}")
