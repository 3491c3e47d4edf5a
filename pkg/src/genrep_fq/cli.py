"""Command line front end.

Exit codes: 0 pass, 1 verification failure, 2 hypothesis failure (the
characteristic of F_q is not invertible in the coefficients), 3 budget or
usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import (BudgetExceeded, DimensionMismatch, GenrepError, Inconsistent, NotNatural,
                     NotSupported, VerificationFailed)
from .genrep import functor_from_json
from .kovacs import solve_singular_unit, verify_unit
from .report import (absorb, add_check, dumps, format_text, idempotent_payload, new_report,
                     run_genrep, run_verify, split_case)
from .scalars import SUPPORTED_Q, coeff_ring

EXIT_PASS, EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ring(text: str):
    try:
        return coeff_ring(text)
    except (ValueError, GenrepError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _q(text: str) -> int:
    q = int(text)
    if q not in SUPPORTED_Q:
        raise argparse.ArgumentTypeError(f"q must be one of {sorted(SUPPORTED_Q)}")
    return q


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    common.add_argument("--out", metavar="FILE", help="write the report to FILE")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker cap (sweeps run in-process; accepted for compatibility)")
    common.add_argument("--coeff", type=_ring, default=coeff_ring("rat"),
                        help="coefficients: rat or gf:L for a prime L")

    p = _Parser(prog="genrep-fq", description="Exact computations in K[M_n(F_q)].")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("idempotent", parents=[common], help="solve for the singular unit")
    s.add_argument("--q", type=_q, default=2)
    s.add_argument("--n", type=int, default=2)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("target", choices=["kovacs", "morita", "rook", "genrep", "recollement", "all"])
    s.add_argument("--q", type=_q)
    s.add_argument("--n", type=int)
    s.add_argument("--N", type=int)
    s.add_argument("--profile", choices=["desk", "extended"], default="desk")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int)

    s = sub.add_parser("genrep", parents=[common], help="theta, filtration, round trips")
    s.add_argument("--functor", default="gr", help="gr, const or proj:n")
    s.add_argument("--load", metavar="FILE", help="read a functor from JSON instead")
    s.add_argument("--save", metavar="FILE", help="write the functor data as JSON")
    s.add_argument("--q", type=_q, default=2)
    s.add_argument("--N", type=int, default=2)
    s.add_argument("--action", choices=["theta", "filtration", "roundtrip"], default="theta")

    s = sub.add_parser("split", parents=[common], help="natural splitting questions")
    s.add_argument("--category", choices=["fin", "epi"], default="fin")
    s.add_argument("--case", choices=["eps", "incl12", "identity"], default="eps")
    s.add_argument("--N", type=int, default=2)
    return p


def _command_echo(argv) -> str:
    skip = {"--out"}
    out, it = [], iter(argv)
    for a in it:
        if a in skip:
            next(it, None)
            continue
        out.append(a)
    return " ".join(out)


def cmd_idempotent(args, echo: str) -> tuple[dict, int]:
    ring = args.coeff
    report = new_report(echo, {"q": args.q, "n": args.n, "coeff_ring": ring.name})
    try:
        u = solve_singular_unit(args.q, args.n, ring)
    except Inconsistent as exc:
        add_check(report, "solve", False, reason=str(exc))
        report["status"] = "hypothesis_failure"
        report["payload"]["explanation"] = (
            "the unit exists only when the characteristic of F_q is invertible in K")
        if exc.certificate:
            report["payload"]["certificate"] = {str(i): ring.fmt(v)
                                                for i, v in sorted(exc.certificate.items())}
        return report, EXIT_HYPOTHESIS
    absorb(report, "verify_unit", verify_unit(u))
    report["payload"].update(idempotent_payload(u))
    return report, EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


def cmd_verify(args, echo: str) -> tuple[dict, int]:
    report = run_verify(args.target, args.profile, args.q, args.n, args.N, args.coeff,
                        args.seed, args.samples, command=echo)
    report["config"]["jobs"] = args.jobs
    return report, EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


def cmd_genrep(args, echo: str) -> tuple[dict, int]:
    F = None
    if args.load:
        with open(args.load, encoding="utf-8") as fh:
            F = functor_from_json(json.load(fh))
        args.q, args.N, args.functor = F.q, F.N, F.name
    try:
        report = run_genrep(args.functor, args.q, args.N, args.action, args.coeff, echo, F=F)
    except Inconsistent as exc:
        report = new_report(echo, {"functor": args.functor, "q": args.q, "N": args.N,
                                   "action": args.action, "coeff_ring": args.coeff.name})
        add_check(report, args.action, False, reason=str(exc))
        report["status"] = "hypothesis_failure"
        return report, EXIT_HYPOTHESIS
    if args.save:
        from .genrep import make_builtin
        G = F if F is not None else make_builtin(args.functor, args.q, args.coeff, args.N)
        with open(args.save, "w", encoding="utf-8") as fh:
            json.dump(G.to_json(), fh, sort_keys=True, ensure_ascii=False)
    if report["status"] == "hypothesis_failure":
        return report, EXIT_HYPOTHESIS
    return report, EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


def cmd_split(args, echo: str) -> tuple[dict, int]:
    ring = args.coeff
    report = new_report(echo, {"category": args.category, "case": args.case, "N": args.N,
                               "coeff_ring": ring.name})
    res = split_case(args.category, args.case, args.N, ring)
    if not res.split:
        add_check(report, "certificate_valid", bool(res.certificate_valid))
    else:
        add_check(report, "witness_verified", True)
    report["payload"]["split"] = {"category": args.category, "case": args.case,
                                  **res.to_json(ring)}
    return report, EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


COMMANDS = {"idempotent": cmd_idempotent, "verify": cmd_verify, "genrep": cmd_genrep,
            "split": cmd_split}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    echo = _command_echo(argv)
    try:
        report, code = COMMANDS[args.command](args, echo)
    except (BudgetExceeded, NotSupported, DimensionMismatch, NotNatural) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Inconsistent as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    text = dumps(report) if args.json else format_text(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
