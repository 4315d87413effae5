"""Command-line front end: ``malcev-forge <subcommand> <subject> [options]``.

A subject is ``builtin:NAME`` or the path of an algebra document. Reports go to
stdout (``--format human`` or ``json``), diagnostics to stderr. Exit codes:
0 all checks pass, 1 some check fails, 2 inconclusive or conditional results
only, 3 usage, parse or refused-hypothesis errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from typing import List, Optional, Sequence

from .algebra import AlgebraError
from .catalog import BUILTIN_NAMES
from .eaa import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    QuadraticToralPair,
    compute_core,
    eaa_checks,
    verify_core_pair,
)
from .identities import IDENTITIES, DEFAULT_SAMPLES, check_form, check_identity, identity_spec
from .iolib import ParseError, load
from .loop import FLAVORS, LoopAlgebra, check_eaa_loop, check_loop_identity, malcev_obstruction, parse_cocycle
from .report import EXIT_ERROR, PASS, REFUSED, CheckReport
from .toral import NotToral, check_partial_grading, check_root_symmetry, decompose, verify_toral

log = logging.getLogger("malcev_forge")

THREADS_ENV = "MALCEV_FORGE_THREADS"
# flags that must not change the report, so they are left out of the command echo
_NOT_ECHOED = {"--threads": True, "--timing": False}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonnegative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=_positive, default=argparse.SUPPRESS,
                        help=f"worker processes (default: ${THREADS_ENV} or the CPU count)")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="add elapsed_ms to the report (makes output run-dependent)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="malcev-forge", parents=[common],
                description="Exact verification of Malcev and extended affine algebra structure.",
                epilog=f"built-in subjects: {', '.join('builtin:' + n for n in BUILTIN_NAMES)}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.add_argument("subject", help="builtin:NAME or a document path")
        return sp

    sp = add("identities", "check a polynomial identity on the basis")
    sp.add_argument("--identity", required=True, choices=sorted(IDENTITIES))
    sp.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=_positive, default=DEFAULT_SAMPLES)

    add("form", "check invariance, B-symmetry, gradedness and nondegeneracy of the form")

    sp = add("decompose", "root space decomposition with respect to the declared toral subalgebra")
    sp.add_argument("--partial-grading", action="store_true",
                    help="also check the root-space product containments")

    sp = add("eaa", "extended affine algebra axioms")
    sp.add_argument("--budget", type=_nonnegative, default=DEFAULT_BUDGET)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sp = add("core", "core subalgebra generated by the non-isotropic root spaces")
    sp.add_argument("--budget", type=_nonnegative, default=DEFAULT_BUDGET)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sp = add("affinize", "loop construction over Z^n and checks inside a truncation box")
    sp.add_argument("--flavor", choices=FLAVORS, required=True)
    sp.add_argument("--rank", type=_positive, default=1)
    sp.add_argument("--cocycle", default=None, help="row-major entries q11,q12,... (default: all 1)")
    sp.add_argument("--box", type=_nonnegative, default=1)
    sp.add_argument("--check", required=True, help="an identity name or 'eaa'")
    sp.add_argument("--budget", type=_nonnegative, default=DEFAULT_BUDGET)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    add("obstruction", "decide from the base algebra whether the loop constructions are Malcev")
    return p


def _echo(argv: Sequence[str]) -> List[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        flag = a.split("=", 1)[0]
        if flag in _NOT_ECHOED:
            skip = _NOT_ECHOED[flag] and "=" not in a
            continue
        out.append(a)
    return out


def _datum(pair, subject):
    if pair is None:
        raise NotToral(f"{subject} declares no toral subalgebra")
    return decompose(pair)


def cmd_identities(args, alg, pair) -> CheckReport:
    spec = identity_spec(args.identity)
    if args.mode == "exhaustive" and not spec.multilinear:
        raise UsageError(f"{spec.name} is not multilinear; use --mode sampled")
    rep = check_identity(alg, spec, args.mode, args.seed, args.count, args.threads)
    if args.mode == "sampled":
        rep.subject.update(seed=args.seed, count=args.count)
    return rep


def cmd_form(args, alg, pair) -> CheckReport:
    if alg.gram is None:
        raise AlgebraError(f"{args.subject} has no bilinear form")
    rep = check_form(alg)
    rep.subject = {"algebra": alg.name or "?", "dim": alg.dim}
    return rep


def cmd_decompose(args, alg, pair) -> CheckReport:
    datum = _datum(pair, args.subject)
    rep = verify_toral(datum)
    rep.extend(check_root_symmetry(datum))
    roots = []
    for r in datum.roots:
        roots.append({
            "root": str(r),
            "dim": len(datum.spaces[r]),
            "basis": [str(v) for v in datum.spaces[r]],
            "degrees": sorted(b for (rr, b) in datum.graded_pieces if rr == r),
        })
    rep.add("roots", PASS, roots=roots, per_degree={b: sorted((str(r) for r in rs)) for b, rs in
                                                    sorted(datum.per_degree.items())})
    if args.partial_grading:
        rep.extend(check_partial_grading(datum), prefix="partial_grading.")
    return rep


def cmd_eaa(args, alg, pair) -> CheckReport:
    q = QuadraticToralPair(_datum(pair, args.subject))
    rep = eaa_checks(q, args.budget, args.seed)
    rep.subject.update(budget=args.budget, seed=args.seed)
    return rep


def cmd_core(args, alg, pair) -> CheckReport:
    q = QuadraticToralPair(_datum(pair, args.subject))
    core = compute_core(q, args.budget, args.seed)
    rep = CheckReport(subject={"algebra": alg.name or "?", "budget": args.budget, "seed": args.seed})
    rep.add("core", PASS, dim=core.dim, basis=[str(v) for v in core.core_basis],
            H_c=[str(h) for h in core.hc_basis], nonisotropic=sorted(str(r) for r in core.nonisotropic),
            exact=core.exact)
    verify = verify_core_pair(q, args.budget, args.seed)
    rep.extend(verify)
    return rep


def cmd_affinize(args, alg, pair) -> CheckReport:
    try:
        coc = parse_cocycle(args.cocycle or ",".join(["1"] * args.rank ** 2), args.rank)
    except ValueError as exc:
        raise UsageError(f"--cocycle: {exc}") from None
    la = LoopAlgebra(alg, coc, args.flavor)
    if args.check == "eaa":
        rep = check_eaa_loop(la, _datum(pair, args.subject), args.box, args.budget, args.seed)
        rep.subject.update(budget=args.budget, seed=args.seed)
        return rep
    try:
        spec = identity_spec(args.check)
    except (KeyError, ValueError):
        raise UsageError(f"--check must be 'eaa' or one of {', '.join(sorted(IDENTITIES))}") from None
    if not spec.multilinear:
        raise UsageError(f"--check {spec.name}: loop checks need a multilinear identity")
    return check_loop_identity(la, spec, args.box, args.threads)


def cmd_obstruction(args, alg, pair) -> CheckReport:
    return malcev_obstruction(alg)


COMMANDS = {
    "identities": cmd_identities,
    "form": cmd_form,
    "decompose": cmd_decompose,
    "eaa": cmd_eaa,
    "core": cmd_core,
    "affinize": cmd_affinize,
    "obstruction": cmd_obstruction,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        fmt = getattr(args, "format", "human")
        args.threads = getattr(args, "threads", None) or default_threads()
        timing = getattr(args, "timing", False)
        logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                            stream=stderr, format="%(levelname)s: %(message)s")
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_ERROR

    start = time.perf_counter()
    try:
        alg, pair = load(args.subject)
        rep = COMMANDS[args.command](args, alg, pair)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=stderr)
        return EXIT_ERROR
    except (ParseError, OSError, KeyError) as exc:
        print(f"{parser.prog}: cannot load {args.subject}: {exc}", file=stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=stderr)
        return EXIT_ERROR
    except AlgebraError as exc:
        rep = CheckReport(subject={"subject": args.subject})
        rep.add("hypothesis", REFUSED, error=str(exc))
    rep.command = [args.command] + _echo(argv[argv.index(args.command) + 1:]) if args.command in argv else None
    if timing:
        rep.elapsed_ms = round((time.perf_counter() - start) * 1000)
    stdout.write(rep.to_json() if fmt == "json" else rep.to_text())
    return rep.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
