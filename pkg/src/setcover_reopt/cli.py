"""Command-line entry point.

Exit codes: 0 success, 1 domain error (bad input file, infeasible or
precondition failure, failed verification), 2 usage error. Errors go to
stderr as a single line ``error[<code>]: <message>``.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__
from .core import (
    FORMAT_VERSION,
    DuplicateExtentWarning,
    FormatError,
    InfeasibleInstanceError,
    InfeasibleSolutionError,
    Instance,
    PreconditionError,
    RatioFunction,
    SetCoverError,
    UnknownSetError,
    check_valid,
    format_instance,
    format_rational,
    format_solution,
    parse_instance,
    parse_rational,
    parse_solution,
)
from .harness import DEFAULT_SPECS, DEFAULT_TRIALS, KINDS, GenSpec, certify
from .modifications import (
    QualityRefutedError,
    apply,
    format_modification,
    inverse,
    make_reopt,
    parse_modification,
)
from .reductions import (
    ADD_ELEM_WEIGHTED,
    CHAIN_KINDS,
    GADGET_KINDS,
    RM_ELEM_CHAIN,
    ChainGadget,
    Gadget,
    RefutationError,
    build_gadget,
    chain_add_element,
    chain_remove_element,
    domset_instance,
    parse_graph,
    preprocess_singletons,
)
from .reopt_algorithms import ptas_case_distinction, repair_add_element
from .solvers import OracleLimitError, decide_bounded, greedy, solve_exact

_CODES = (
    (FormatError, "format"),
    (UnknownSetError, "unknown-set"),
    (InfeasibleInstanceError, "infeasible-instance"),
    (InfeasibleSolutionError, "infeasible-solution"),
    (QualityRefutedError, "quality-refuted"),
    (OracleLimitError, "oracle-limit"),
    (RefutationError, "refutation"),
    (PreconditionError, "precondition"),
    (SetCoverError, "setcover"),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args: argparse.Namespace, text: str, path: str | None = None) -> None:
    target = path or args.output
    if target in (None, "-", "stdout"):
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _load(path: str, strict: bool = False) -> Instance:
    return check_valid(parse_instance(_read(path)), strict)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ratio(text: str) -> RatioFunction:
    try:
        return RatioFunction.parse(text)
    except (FormatError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scale(text: str) -> tuple[int, int, Fraction]:
    try:
        n, m, p = text.split(",")
        return int(n), int(m), Fraction(p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n,m,p, got {text!r}") from None


# commands


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load(args.instance, args.strict)
    if args.greedy:
        sol = greedy(inst)
    elif args.bounded is not None:
        sol = decide_bounded(inst, args.bounded, time_limit=args.time_limit)
        if sol is None:
            _emit(args, f"exceeds: {args.bounded}\n")
            return 0
    else:
        sol = solve_exact(inst, time_limit=args.time_limit)
    _emit(args, format_solution(sol, with_value=True))
    return 0


def cmd_modify(args: argparse.Namespace) -> int:
    inst = _load(args.instance, args.strict)
    mod = parse_modification(_read(args.modfile))
    out = apply(inst, mod, strict=args.strict)
    if args.write_inverse:
        Path(args.write_inverse).write_text(format_modification(inverse(mod, inst), inst.weighted), encoding="utf-8")
    _emit(args, format_instance(out), args.out)
    return 0


def cmd_reopt(args: argparse.Namespace) -> int:
    inst = _load(args.instance, args.strict)
    sol = parse_solution(_read(args.solution), inst)
    mod = parse_modification(_read(args.modfile))
    r = make_reopt(inst, sol, args.rho, mod, strict=args.strict, time_limit=args.time_limit)
    alg = args.alg
    if alg == "repair":
        out = repair_add_element(r)
    elif alg == "exact":
        out = solve_exact(r.new, time_limit=args.time_limit)
    elif alg.startswith("ptas:"):
        eps = _rational(alg[5:])
        if eps <= 0:
            raise UsageError("ptas accuracy must be positive")
        out = ptas_case_distinction(r, eps)
    else:
        raise UsageError(f"unknown algorithm {alg!r}; use repair, ptas:<eps> or exact")
    _emit(args, format_solution(out, with_value=True))
    return 0


def _meta(pairs: dict[str, object]) -> str:
    def fmt(v: object) -> str:
        if isinstance(v, Fraction):
            return format_rational(v)
        if isinstance(v, tuple | list):
            return " ".join(str(x) for x in v) or "-"
        return str(v)

    return "".join(f"{k}: {fmt(v)}\n" for k, v in pairs.items())


def _write_gadget(d: Path, g: Gadget) -> None:
    d.mkdir(parents=True, exist_ok=True)
    r = g.reopt
    (d / "old.txt").write_text(format_instance(r.old), encoding="utf-8")
    (d / "old_solution.txt").write_text(format_solution(r.old_solution, with_value=True), encoding="utf-8")
    (d / "mod.txt").write_text(format_modification(r.mod, r.old.weighted), encoding="utf-8")
    (d / "new.txt").write_text(format_instance(r.new), encoding="utf-8")
    meta = {"kind": g.kind, "relation": g.relation, "old_opt": g.old_opt, "format": FORMAT_VERSION}
    meta.update({k: v for k, v in g.metadata.items()})
    (d / "meta.txt").write_text(_meta(meta), encoding="utf-8")


def _write_chain(d: Path, cg: ChainGadget) -> None:
    d.mkdir(parents=True, exist_ok=True)
    chain = cg.chain
    width = len(str(len(chain)))
    for i, inst in enumerate(chain.instances):
        (d / f"instance-{i:0{width}d}.txt").write_text(format_instance(inst), encoding="utf-8")
    for i, mod in enumerate(chain.mods, 1):
        (d / f"mod-{i:0{width}d}.txt").write_text(format_modification(mod, False), encoding="utf-8")
    if chain.start_solution is not None:
        (d / "start_solution.txt").write_text(format_solution(chain.start_solution, with_value=True), encoding="utf-8")
    (d / "source.txt").write_text(format_instance(cg.source), encoding="utf-8")
    meta = {"kind": cg.kind, "steps": len(chain), "bound": str(chain.bound),
            "final_bound": str(chain.final_bound or chain.bound), "format": FORMAT_VERSION}
    meta.update({k: v for k, v in cg.metadata.items() if k != "graph"})
    (d / "meta.txt").write_text(_meta(meta), encoding="utf-8")


def cmd_gadget(args: argparse.Namespace) -> int:
    out = Path(args.out)
    text = _read(args.input)
    if args.kind in CHAIN_KINDS:
        if args.kind == RM_ELEM_CHAIN:
            graph = parse_graph(text)
            approx = args.approx.split(",") if args.approx else greedy(domset_instance(graph)).names
            cg = chain_remove_element(graph, approx)
        else:
            cg = chain_add_element(check_valid(parse_instance(text), args.strict))
        _write_chain(out, cg)
        return 0
    src = check_valid(parse_instance(text), args.strict)
    if args.kind == ADD_ELEM_WEIGHTED:
        if args.all_guesses:
            n = len(preprocess_singletons(src).reduced.universe)
            if n == 0:
                raise PreconditionError("preprocessing leaves no elements; no guesses to emit")
            for g in range(1, n + 1):
                _write_gadget(out / f"guess-{g}", build_gadget(args.kind, src, guess=g))
            return 0
        if args.guess is None:
            raise UsageError("add-elem-weighted needs --guess g or --all-guesses")
    elif args.guess is not None or args.all_guesses:
        raise UsageError("--guess/--all-guesses apply to add-elem-weighted only")
    _write_gadget(out, build_gadget(args.kind, src, guess=args.guess, f=args.f))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    base = DEFAULT_SPECS[args.kind]
    n, m, p = args.scale or (base.n_elements, base.n_sets, base.density)
    spec = GenSpec(args.seed, n, m, p, base.weight_range, base.weight_steps, args.strict)
    report = certify(args.kind, spec, args.trials, time_limit=args.time_limit)
    _emit(args, report.to_tsv(timings=args.timings))
    if not report.all_pass:
        print(f"verify: {len(report.records) - report.passed} of {len(report.records)} trials did not pass",
              file=sys.stderr)
        return 1
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    lines = ["kind\ttrials\tpass\tfail\tinconclusive"]
    ok = True
    for kind in KINDS:
        trials = max(1, round(DEFAULT_TRIALS[kind] * args.trials_scale))
        report = certify(kind, DEFAULT_SPECS[kind], trials, time_limit=args.time_limit)
        fail = len(report.failed)
        inconclusive = len(report.records) - report.passed - fail
        ok &= report.all_pass
        lines.append(f"{kind}\t{trials}\t{report.passed}\t{fail}\t{inconclusive}")
        if args.dir:
            Path(args.dir).mkdir(parents=True, exist_ok=True)
            (Path(args.dir) / f"{kind}.tsv").write_text(report.to_tsv(), encoding="utf-8")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if ok else 1


# parser


def _globals(defaults: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so they
    # may appear on either side of the subcommand name
    p = _Parser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--strict", action="store_true", default=d(False), help="require pairwise distinct extents")
    p.add_argument("--time-limit", type=float, default=d(None), metavar="S", help="wall-clock limit for exact search")
    p.add_argument("--output", default=d(None), metavar="PATH", help="write output to PATH instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="setcover-reopt", description="Set cover reoptimization toolkit", parents=[_globals(True)])
    parser.add_argument("--version", action="version",
                        version=f"setcover-reopt {__version__} (format v{FORMAT_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    g = [_globals(False)]

    p = sub.add_parser("solve", parents=g, help="solve an instance")
    p.add_argument("instance")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact branch and bound (default)")
    mode.add_argument("--greedy", action="store_true")
    mode.add_argument("--bounded", type=int, metavar="K", help="optimal cover if OPT <= K, else 'exceeds: K'")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("modify", parents=g, help="apply one modification")
    p.add_argument("instance")
    p.add_argument("modfile")
    p.add_argument("-o", dest="out", metavar="OUT")
    p.add_argument("--write-inverse", metavar="PATH", help="also write the undoing modification")
    p.set_defaults(func=cmd_modify)

    p = sub.add_parser("reopt", parents=g, help="reoptimize after a modification")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("modfile")
    p.add_argument("--alg", default="exact", help="repair | ptas:<eps> | exact")
    p.add_argument("--rho", type=_rational, default=Fraction(1), help="promised quality of the old solution")
    p.set_defaults(func=cmd_reopt)

    p = sub.add_parser("gadget", parents=g, help="build a hardness gadget")
    p.add_argument("kind", choices=GADGET_KINDS + CHAIN_KINDS)
    p.add_argument("input", help="instance file, or graph file for rm-elem-chain")
    guess = p.add_mutually_exclusive_group()
    guess.add_argument("--guess", type=int)
    guess.add_argument("--all-guesses", action="store_true")
    p.add_argument("--f", type=_ratio, default=None, help="const:<c> | logln:<alpha> (rm-elem-weighted)")
    p.add_argument("--approx", help="comma-separated dominating set (rm-elem-chain; default greedy)")
    p.add_argument("-o", dest="out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("verify", parents=g, help="oracle-certify a construction on seeded instances")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--scale", type=_scale, metavar="N,M,P")
    p.add_argument("--timings", action="store_true", help="append a seconds column (not byte-stable)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", parents=g, help="run the default certification suite")
    p.add_argument("--trials-scale", type=Fraction, default=Fraction(1), metavar="Q")
    p.add_argument("--dir", help="write one report per kind into DIR")
    p.set_defaults(func=cmd_experiment)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DuplicateExtentWarning)
            return args.func(args)
    except UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 2
    except SetCoverError as exc:
        code = next(c for cls, c in _CODES if isinstance(exc, cls))
        print(f"error[{code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
