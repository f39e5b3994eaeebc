"""Command-line front-end over the JSON formats.

Machine-first: JSON on stdout, human diagnostics on stderr. Exit 0 on
success, 1 on domain failure (validation/check failed, not converged,
infeasible certificate), 2 on usage or format errors. Stdout is valid JSON
whenever the exit code is 0 or 1. A ``-`` file argument reads stdin.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import serialize
from .ensemble import random_ensemble, validate
from .errors import (
    BadPriorsError,
    BadRanksError,
    CountMismatchError,
    DimMismatchError,
    QsdError,
    SpanDeficientError,
)
from .lsm import compute_lsm
from .optimal import certify, prob_correct, solve_optimal
from .sim import simulate
from .vnm import vnm_report


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    stdout: str
    stderr: str


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qsd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check ensemble invariants")
    p.add_argument("ensemble")

    p = sub.add_parser("gen", help="generate a seeded random ensemble")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--ranks", required=True, help="comma-separated state ranks")
    p.add_argument("--priors", default="uniform",
                   help="'uniform' or comma-separated probabilities")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--independent", action="store_true")

    p = sub.add_parser("lsm", help="least-squares measurement")
    p.add_argument("ensemble")
    p.add_argument("--out")

    p = sub.add_parser("solve", help="optimal measurement with certificate")
    p.add_argument("ensemble")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--out")
    p.add_argument("--cert")

    p = sub.add_parser("certify", help="re-check an optimality certificate")
    p.add_argument("ensemble")
    p.add_argument("povm")
    p.add_argument("cert")
    p.add_argument("--tol", type=float, default=1e-7)

    p = sub.add_parser("pd", help="probability of correct detection")
    p.add_argument("ensemble")
    p.add_argument("povm")

    p = sub.add_parser("check-vnm", help="Von Neumann structure report")
    p.add_argument("ensemble")
    p.add_argument("povm")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("simulate", help="Monte Carlo detection experiment")
    p.add_argument("ensemble")
    p.add_argument("povm")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    return parser


def _read_document(path: str):
    text = sys.stdin.read() if path == "-" else open(path, "r").read()
    return json.loads(text)


def _load_ensemble(path: str):
    return serialize.ensemble_from_wire(_read_document(path))


def _load_povm(path: str):
    return serialize.povm_from_wire(_read_document(path))


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(serialize.dumps(payload) + "\n")


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise _UsageError(f"{what} must be comma-separated integers: {text!r}")


def _cmd_validate(args):
    report = validate(_load_ensemble(args.ensemble))
    code = 0 if report.passed else 1
    return serialize.validation_report_to_wire(report), code, ""


def _cmd_gen(args):
    ranks = _parse_int_list(args.ranks, "--ranks")
    if args.priors == "uniform":
        priors = "uniform"
    else:
        try:
            priors = [float(part) for part in args.priors.split(",") if part != ""]
        except ValueError:
            raise _UsageError(f"--priors must be numbers: {args.priors!r}")
    e = random_ensemble(
        dim=args.dim,
        ranks=ranks,
        priors=priors,
        seed=args.seed,
        require_independent=args.independent,
    )
    return serialize.ensemble_to_wire(e), 0, ""


def _failed_validation(report):
    return serialize.validation_report_to_wire(report), 1, "ensemble failed validation"


def _cmd_lsm(args):
    e = _load_ensemble(args.ensemble)
    report = validate(e)
    if not report.passed:
        return _failed_validation(report)
    payload = serialize.povm_to_wire(compute_lsm(e))
    if args.out:
        _write_json(args.out, payload)
    return payload, 0, ""


def _cmd_solve(args):
    e = _load_ensemble(args.ensemble)
    report = validate(e)
    if not report.passed:
        return _failed_validation(report)
    povm, cert, diag = solve_optimal(e, tol=args.tol, max_iter=args.max_iter)
    payload = serialize.solve_result_to_wire(povm, cert, diag)
    if args.out:
        _write_json(args.out, payload["povm"])
    if args.cert:
        _write_json(args.cert, payload["certificate"])
    if diag.converged:
        return payload, 0, ""
    return payload, 1, f"not converged after {diag.iterations} iterations"


def _cmd_certify(args):
    e = _load_ensemble(args.ensemble)
    p = _load_povm(args.povm)
    given = serialize.certificate_from_wire(_read_document(args.cert))
    cert = certify(e, p, given.x_hat, tol=args.tol)
    payload = serialize.certificate_to_wire(cert)
    if cert.optimal_at(args.tol):
        return payload, 0, "certificate is feasible and slack"
    parts = []
    if not cert.feasible_at(args.tol):
        parts.append(f"infeasible (min margin {min(cert.feas_margins):.3e})")
    if not cert.slack_at(args.tol):
        parts.append(f"slack violated (max residual {max(cert.slack_residuals):.3e})")
    return payload, 1, "; ".join(parts)


def _cmd_pd(args):
    e = _load_ensemble(args.ensemble)
    p = _load_povm(args.povm)
    return {"pd": prob_correct(e, p)}, 0, ""


def _cmd_check_vnm(args):
    e = _load_ensemble(args.ensemble)
    p = _load_povm(args.povm)
    report = vnm_report(e, p, tol=args.tol)
    payload = serialize.vnm_report_to_wire(report)
    if report.is_von_neumann:
        return payload, 0, ""
    return payload, 1, "measurement is not Von Neumann at the given tolerance"


def _cmd_simulate(args):
    e = _load_ensemble(args.ensemble)
    p = _load_povm(args.povm)
    result = simulate(e, p, trials=args.trials, seed=args.seed)
    return serialize.sim_result_to_wire(result), 0, ""


_HANDLERS = {
    "validate": _cmd_validate,
    "gen": _cmd_gen,
    "lsm": _cmd_lsm,
    "solve": _cmd_solve,
    "certify": _cmd_certify,
    "pd": _cmd_pd,
    "check-vnm": _cmd_check_vnm,
    "simulate": _cmd_simulate,
}

# Structurally bad inputs or arguments: the caller's request never made sense.
_FORMAT_ERRORS = (
    json.JSONDecodeError,
    ValueError,
    OSError,
    BadRanksError,
    BadPriorsError,
    DimMismatchError,
    CountMismatchError,
)


def dispatch(argv) -> CommandResult:
    """Run one command; never raises for bad input or domain failures."""
    try:
        args = _build_parser().parse_args(list(argv))
    except _UsageError as exc:
        return CommandResult(2, "", f"error: {exc}")
    try:
        payload, code, note = _HANDLERS[args.command](args)
    except _UsageError as exc:
        return CommandResult(2, "", f"error: {exc}")
    except SpanDeficientError as exc:
        payload = {"error": "span_deficient", "span_rank": exc.span_rank,
                   "dim": exc.dim, "message": str(exc)}
        return CommandResult(1, serialize.dumps(payload), str(exc))
    except _FORMAT_ERRORS as exc:
        return CommandResult(2, "", f"error: {exc}")
    except QsdError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        return CommandResult(1, serialize.dumps(payload), str(exc))
    return CommandResult(code, serialize.dumps(payload), note)


def main() -> None:
    result = dispatch(sys.argv[1:])
    if result.stdout:
        print(result.stdout)
    if result.stderr:
        print(result.stderr, file=sys.stderr)
    sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
