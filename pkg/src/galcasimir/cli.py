"""Command-line interface: ``galcasimir {gen,verify,reduce,center,structure}``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .galilean import basis, structure_constants
from .invariants import generator_set
from .polyring import format_rational

GEN_MAX_N = 12
# generation at n >= 10 needs more memory than a desk machine has (n = 9 already
# produces a 2.8M-term Q5)
GEN_FEASIBLE_N = 9
CENTER_MAX_N = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 as well; keep the message format
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _check_range(n: int, lo: int, hi: int, what: str) -> None:
    if not lo <= n <= hi:
        raise UsageError(f"{what}: --n must satisfy {lo} <= N <= {hi}, got {n}")


def cmd_gen(args) -> int:
    _check_range(args.n, 1, GEN_MAX_N, "gen")
    if args.n > GEN_FEASIBLE_N:
        raise UsageError(
            f"gen: n={args.n} is accepted but the expanded generators do not fit in "
            f"memory here; the largest feasible n is {GEN_FEASIBLE_N}"
        )
    gens = generator_set(args.n)
    if args.format == "json":
        _emit_json(gens.to_json())
    elif args.format == "latex":
        sys.stdout.write(gens.to_latex() + "\n")
    else:
        sys.stdout.write(gens.to_text() + "\n")
    return 0


def cmd_verify(args) -> int:
    from .verify import MAX_SUITE_N, run_suite

    _check_range(args.n, 1, MAX_SUITE_N, "verify")
    if args.trials < 1:
        raise UsageError("verify: --trials must be >= 1")
    if args.force_centrality_n4 and args.n != 4:
        raise UsageError("verify: --force-centrality-n4 only applies with --n 4")
    report = run_suite(
        args.n, seed=args.seed, trials=args.trials, force_centrality_n4=args.force_centrality_n4
    )
    if args.json:
        sys.stdout.write(report.dumps())
    else:
        sys.stdout.write(report.to_text())
    return 0 if report.passed else 1


def cmd_reduce(args) -> int:
    from .orbitreduce import FloatDual, pattern_residual, reduce

    try:
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
        xi = FloatDual.from_json(data)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"reduce: cannot read dual vector from {args.input}: {exc}") from exc
    if xi.n < 1:
        raise UsageError("reduce: n must be >= 1")
    if args.tol <= 0:
        raise UsageError("reduce: --tol must be positive")
    form, trace = reduce(xi, tol=args.tol)
    out = {"schema": "v1", "n": xi.n}
    out.update(form.to_json())
    if xi.n <= 8:
        gens = generator_set(xi.n).poly_list()
        out["invariants_before"] = [p.evaluate_float(xi.coords()) for p in gens]
        out["invariants_after"] = [p.evaluate_float(trace.final.coords()) for p in gens]
    else:
        out["invariants_before"] = None
        out["invariants_after"] = None
    out["residual"] = None if form.degenerate else pattern_residual(trace.final)
    out["trace"] = trace.to_json()
    _emit_json(out)
    return 0


def cmd_center(args) -> int:
    from .envelope import central_elements

    if args.n > CENTER_MAX_N or args.n < 1:
        raise UsageError(f"center: centrality computation capped at n={CENTER_MAX_N}")
    elements = central_elements(args.n, args.max_degree)
    _emit_json({"schema": "v1", "n": args.n, "elements": elements})
    return 0 if all(e["central"] for e in elements) else 1


def cmd_structure(args) -> int:
    _check_range(args.n, 1, GEN_MAX_N, "structure")
    labels = basis(args.n)
    sc = structure_constants(args.n)
    consts = [
        {"a": str(labels[a]), "b": str(labels[b]), "c": str(labels[c]), "coeff": format_rational(x)}
        for a, b, c, x in sc.nonzero()
    ]
    _emit_json(
        {"schema": "v1", "n": args.n, "basis": [str(b) for b in labels], "constants": consts}
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="galcasimir", description="Casimir invariants of the Galilean algebra")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="print the generating invariants of gal(N)*")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--format", choices=("json", "latex", "text"), default="json")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run the verification suite for gal(N)")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--force-centrality-n4", action="store_true")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="reduce a dual vector to its transversal normal form")
    r.add_argument("--input", required=True)
    r.add_argument("--tol", type=float, default=1e-9)
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("center", help="symmetrized generators in U(gal(N)), with centrality")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--max-degree", type=int, default=None)
    c.set_defaults(func=cmd_center)

    s = sub.add_parser("structure", help="nonzero structure constants of gal(N)")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_structure)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"galcasimir: {exc}\n")
        return 2
    except BrokenPipeError:
        return 0
