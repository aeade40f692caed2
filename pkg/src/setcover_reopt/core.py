"""Set cover instances and solutions with exact rational weights.

Instances are immutable. The universe and the set family are kept in
canonical order (sorted by name) so iteration, tie-breaking and the text
formats are deterministic.
"""

from __future__ import annotations

import math
import re
import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

FORMAT_VERSION = "1"


class SetCoverError(Exception):
    """Base class for domain errors (infeasible input, violated preconditions)."""


class FormatError(SetCoverError):
    pass


class UnknownSetError(SetCoverError):
    pass


class InfeasibleInstanceError(SetCoverError):
    pass


class InfeasibleSolutionError(SetCoverError):
    pass


class PreconditionError(SetCoverError):
    pass


class DuplicateExtentWarning(UserWarning):
    pass


_RATIONAL = re.compile(r"(\d+)(?:/(\d+))?")


def parse_rational(text: str) -> Fraction:
    """Parse ``num`` or ``num/den`` into a non-negative Fraction."""
    m = _RATIONAL.fullmatch(text.strip())
    if m is None:
        raise FormatError(f"bad rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise FormatError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def is_token(name: object) -> bool:
    return isinstance(name, str) and bool(name) and not any(c.isspace() for c in name)


@dataclass(frozen=True)
class NamedSet:
    name: str
    extent: frozenset[str]
    weight: Fraction = ONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "extent", frozenset(self.extent))
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight < 0:
            raise ValueError(f"set {self.name}: negative weight {self.weight}")


@dataclass(frozen=True)
class Solution:
    """A chosen subfamily, by set name, and its cached value."""

    chosen: frozenset[str]
    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "chosen", frozenset(self.chosen))
        object.__setattr__(self, "value", Fraction(self.value))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self.chosen))

    def __iter__(self):
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.chosen)

    def __contains__(self, name: object) -> bool:
        return name in self.chosen


@dataclass(frozen=True)
class Instance:
    universe: tuple[str, ...]
    family: tuple[NamedSet, ...]
    weighted: bool = False
    _index: dict[str, NamedSet] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "universe", tuple(sorted(self.universe)))
        object.__setattr__(self, "family", tuple(sorted(self.family, key=lambda s: s.name)))
        object.__setattr__(self, "_index", {s.name: s for s in self.family})

    @classmethod
    def build(
        cls,
        universe: Iterable[str],
        sets: Mapping[str, Iterable[str]],
        weights: Mapping[str, Fraction | int | str] | None = None,
        weighted: bool | None = None,
    ) -> Instance:
        """Convenience constructor from a name -> extent mapping.

        ``weighted`` defaults to whether ``weights`` was given; missing
        weights are 1.
        """
        weights = dict(weights or {})
        if weighted is None:
            weighted = bool(weights)
        family = []
        for name, extent in sets.items():
            w = weights.get(name, ONE)
            w = parse_rational(w) if isinstance(w, str) else Fraction(w)
            family.append(NamedSet(name, frozenset(extent), w))
        return cls(tuple(universe), tuple(family), weighted)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.family)

    def __getitem__(self, name: str) -> NamedSet:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSetError(f"unknown set {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def weight(self, name: str) -> Fraction:
        return self[name].weight

    def extent(self, name: str) -> frozenset[str]:
        return self[name].extent

    def covering(self, element: str) -> tuple[str, ...]:
        """Names of the sets containing ``element``."""
        return tuple(s.name for s in self.family if element in s.extent)

    def total_weight(self) -> Fraction:
        return sum((s.weight for s in self.family), ZERO)

    def max_extent_size(self) -> int:
        return max((len(s.extent) for s in self.family), default=0)

    def solution(self, names: Iterable[str]) -> Solution:
        chosen = frozenset(names)
        return Solution(chosen, sum((self[n].weight for n in sorted(chosen)), ZERO))

    def replace_family(self, family: Iterable[NamedSet], universe: Iterable[str] | None = None) -> Instance:
        return Instance(
            tuple(self.universe if universe is None else universe), tuple(family), self.weighted
        )


@dataclass(frozen=True)
class Violation:
    invariant: str
    witness: str

    def __str__(self) -> str:
        return _VIOLATION_TEXT[self.invariant].format(self.witness)


_VIOLATION_TEXT = {
    "token": "invalid name {!r}",
    "duplicate-element": "duplicate element {}",
    "duplicate-name": "duplicate set name {}",
    "extent": "set extent outside universe: {}",
    "unit-weight": "unweighted instance has non-unit weight on set {}",
    "uncovered": "element {} uncovered",
    "duplicate-extent": "duplicate extent on sets {}",
}


def validate(inst: Instance, strict: bool = False) -> Violation | None:
    """Return the first violated instance invariant, or None when valid.

    Duplicate extents are only a violation in strict mode; otherwise they
    raise a ``DuplicateExtentWarning``.
    """
    for e in inst.universe:
        if not is_token(e):
            return Violation("token", e)
    for a, b in zip(inst.universe, inst.universe[1:]):
        if a == b:
            return Violation("duplicate-element", a)
    universe = frozenset(inst.universe)
    seen: set[str] = set()
    for s in inst.family:
        if not is_token(s.name) or ":" in s.name:
            return Violation("token", s.name)
        if s.name in seen:
            return Violation("duplicate-name", s.name)
        seen.add(s.name)
        outside = s.extent - universe
        if outside:
            return Violation("extent", f"{s.name} ({min(outside)})")
        if not inst.weighted and s.weight != ONE:
            return Violation("unit-weight", s.name)
    covered = frozenset().union(*(s.extent for s in inst.family))
    for e in inst.universe:
        if e not in covered:
            return Violation("uncovered", e)
    by_extent: dict[frozenset[str], str] = {}
    for s in inst.family:
        if s.extent in by_extent:
            pair = f"{by_extent[s.extent]},{s.name}"
            if strict:
                return Violation("duplicate-extent", pair)
            warnings.warn(f"duplicate extent on sets {pair}", DuplicateExtentWarning, stacklevel=2)
        else:
            by_extent[s.extent] = s.name
    return None


def check_valid(inst: Instance, strict: bool = False) -> Instance:
    """Raise on the first violated invariant; return ``inst`` otherwise."""
    v = validate(inst, strict)
    if v is not None:
        cls = InfeasibleInstanceError if v.invariant == "uncovered" else PreconditionError
        raise cls(str(v))
    return inst


def _chosen(sol: Solution | Iterable[str]) -> frozenset[str]:
    return sol.chosen if isinstance(sol, Solution) else frozenset(sol)


def is_cover(inst: Instance, sol: Solution | Iterable[str]) -> bool:
    covered: set[str] = set()
    for name in _chosen(sol):
        covered |= inst[name].extent
    return covered.issuperset(inst.universe)


def value(inst: Instance, sol: Solution | Iterable[str]) -> Fraction:
    return sum((inst[name].weight for name in sorted(_chosen(sol))), ZERO)


def restrict(inst: Instance, sol: Solution | Iterable[str]) -> Solution:
    """Re-evaluate a solution's names against ``inst``."""
    return inst.solution(_chosen(sol))


@dataclass(frozen=True)
class RatioFunction:
    """A map n -> rational >= 1 used as an approximation ratio or bound.

    kinds: ``const`` (c), ``logln`` (alpha * ln n, rounded up to a multiple
    of 1/10**6 and clamped to at least 1), ``affine`` (a*n + b) and
    ``table`` (explicit values for n = 1, 2, ...; the last entry repeats).
    """

    kind: str
    params: tuple[Fraction, ...]

    LOG_RESOLUTION = 10**6

    @classmethod
    def const(cls, c: Fraction | int | str) -> RatioFunction:
        return cls("const", (_as_fraction(c),))

    @classmethod
    def logln(cls, alpha: Fraction | int | str) -> RatioFunction:
        return cls("logln", (_as_fraction(alpha),))

    @classmethod
    def affine(cls, a: Fraction | int | str, b: Fraction | int | str = 0) -> RatioFunction:
        return cls("affine", (_as_fraction(a), _as_fraction(b)))

    @classmethod
    def table(cls, values: Iterable[Fraction | int | str]) -> RatioFunction:
        vals = tuple(_as_fraction(v) for v in values)
        if not vals or min(vals) < 1:
            raise ValueError("table ratio needs values >= 1")
        return cls("table", vals)

    @classmethod
    def parse(cls, text: str) -> RatioFunction:
        kind, _, arg = text.partition(":")
        try:
            if kind == "const":
                return cls.const(arg)
            if kind == "logln":
                return cls.logln(arg)
            if kind == "affine":
                a, _, b = arg.partition(",")
                return cls.affine(a, b or "0")
            if kind == "table":
                return cls.table(arg.split(","))
        except (FormatError, ValueError) as exc:
            raise FormatError(f"bad ratio function {text!r}: {exc}") from None
        raise FormatError(f"bad ratio function {text!r}")

    def __str__(self) -> str:
        return f"{self.kind}:" + ",".join(format_rational(p) for p in self.params)

    def __call__(self, n: int) -> Fraction:
        if self.kind == "const":
            return self.params[0]
        if self.kind == "affine":
            return self.params[0] * n + self.params[1]
        if self.kind == "table":
            return self.params[min(max(n, 1), len(self.params)) - 1]
        if self.kind == "logln":
            if n <= 1:
                return ONE
            scaled = math.ceil(float(self.params[0]) * math.log(n) * self.LOG_RESOLUTION)
            return max(ONE, Fraction(scaled, self.LOG_RESOLUTION))
        raise ValueError(f"unknown ratio kind {self.kind!r}")


def _as_fraction(x: Fraction | int | str) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


# text formats


def _content_lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def format_instance(inst: Instance) -> str:
    lines = [_joined("universe:", inst.universe)]
    for s in inst.family:
        head = f"set {s.name}"
        if inst.weighted:
            head += f" w={format_rational(s.weight)}"
        lines.append(_joined(head + ":", sorted(s.extent)))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    """Parse the line-based instance format.

    The instance is weighted iff at least one set line carries ``w=``.
    """
    universe: list[str] | None = None
    family: list[NamedSet] = []
    weighted = False
    for lineno, line in _content_lines(text):
        head, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(f"line {lineno}: missing ':'")
        words = head.split()
        if universe is None:
            if words != ["universe"]:
                raise FormatError(f"line {lineno}: expected 'universe:' first")
            universe = rest.split()
            continue
        if not words or words[0] != "set" or len(words) not in (2, 3):
            raise FormatError(f"line {lineno}: expected 'set <name> [w=<rational>]:'")
        weight = ONE
        if len(words) == 3:
            if not words[2].startswith("w="):
                raise FormatError(f"line {lineno}: expected w=<rational>, got {words[2]!r}")
            weight = parse_rational(words[2][2:])
            weighted = True
        family.append(NamedSet(words[1], frozenset(rest.split()), weight))
    if universe is None:
        raise FormatError("missing 'universe:' line")
    return Instance(tuple(universe), tuple(family), weighted)


def format_solution(sol: Solution, with_value: bool = False) -> str:
    text = _joined("solution:", sol.names) + "\n"
    if with_value:
        text += f"value: {format_rational(sol.value)}\n"
    return text


def parse_solution(text: str, inst: Instance) -> Solution:
    names: list[str] | None = None
    claimed: Fraction | None = None
    for lineno, line in _content_lines(text):
        head, sep, rest = line.partition(":")
        key = head.strip()
        if sep and key == "solution" and names is None:
            names = rest.split()
        elif sep and key == "value" and claimed is None:
            claimed = parse_rational(rest)
        else:
            raise FormatError(f"line {lineno}: unexpected {line!r}")
    if names is None:
        raise FormatError("missing 'solution:' line")
    sol = inst.solution(names)
    if claimed is not None and claimed != sol.value:
        raise FormatError(f"stated value {format_rational(claimed)} != {format_rational(sol.value)}")
    return sol


def _joined(head: str, words: Iterable[str]) -> str:
    return " ".join([head, *words])
