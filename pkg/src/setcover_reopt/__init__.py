"""Set cover reoptimization toolkit: exact and approximate solvers, local
modifications, reoptimization algorithms, hardness gadgets and a seeded
certification harness."""

__version__ = "0.1.0"

from .core import (
    FORMAT_VERSION,
    FormatError,
    InfeasibleInstanceError,
    InfeasibleSolutionError,
    Instance,
    NamedSet,
    PreconditionError,
    RatioFunction,
    SetCoverError,
    Solution,
    UnknownSetError,
    format_instance,
    format_solution,
    is_cover,
    parse_instance,
    parse_solution,
    validate,
    value,
)
from .modifications import AddElement, AddSet, RemoveElement, RemoveSet, apply, inverse, make_reopt
from .solvers import decide_bounded, enumerate_optima, greedy, solve_exact

__all__ = [
    "FORMAT_VERSION",
    "AddElement",
    "AddSet",
    "FormatError",
    "InfeasibleInstanceError",
    "InfeasibleSolutionError",
    "Instance",
    "NamedSet",
    "PreconditionError",
    "RatioFunction",
    "RemoveElement",
    "RemoveSet",
    "SetCoverError",
    "Solution",
    "UnknownSetError",
    "apply",
    "decide_bounded",
    "enumerate_optima",
    "format_instance",
    "format_solution",
    "greedy",
    "inverse",
    "is_cover",
    "make_reopt",
    "parse_instance",
    "parse_solution",
    "solve_exact",
    "validate",
    "value",
]
