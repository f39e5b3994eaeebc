"""JSON wire formats.

Matrices are row-major with every entry a two-element [re, im] array.
Serialization goes through ``json.dumps``, whose shortest-repr float encoding
round-trips IEEE doubles losslessly.
"""

from __future__ import annotations

import json

import numpy as np

from .ensemble import Ensemble, State, ValidationReport
from .lsm import Povm, make_povm
from .optimal import Certificate, SolveDiagnostics
from .sim import SimResult
from .vnm import VnmReport


def dumps(payload) -> str:
    return json.dumps(payload)


def matrix_to_wire(m) -> list:
    a = np.asarray(m, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def matrix_from_wire(data) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ValueError("matrix must be a non-empty list of rows")
    cols = None
    rows = []
    for row in data:
        if not isinstance(row, list) or (cols is not None and len(row) != cols):
            raise ValueError("matrix rows must be lists of equal length")
        cols = len(row)
        entries = []
        for entry in row:
            if not isinstance(entry, list) or len(entry) != 2:
                raise ValueError("matrix entries must be [re, im] pairs")
            entries.append(complex(float(entry[0]), float(entry[1])))
        rows.append(entries)
    return np.array(rows, dtype=np.complex128)


def ensemble_to_wire(e: Ensemble) -> dict:
    return {
        "dim": e.dim,
        "states": [
            {"prior": float(s.prior), "rho": matrix_to_wire(s.rho)}
            for s in e.states
        ],
    }


def ensemble_from_wire(data) -> Ensemble:
    if not isinstance(data, dict):
        raise ValueError("ensemble document must be a JSON object")
    try:
        dim = int(data["dim"])
        raw_states = data["states"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"ensemble document missing field: {exc}") from None
    if not isinstance(raw_states, list) or not raw_states:
        raise ValueError("ensemble states must be a non-empty list")
    states = []
    for entry in raw_states:
        if not isinstance(entry, dict) or "prior" not in entry or "rho" not in entry:
            raise ValueError("each state needs 'prior' and 'rho'")
        states.append(
            State(prior=float(entry["prior"]), rho=matrix_from_wire(entry["rho"]))
        )
    return Ensemble(dim=dim, states=tuple(states))


def povm_to_wire(p: Povm) -> dict:
    return {
        "dim": p.dim,
        "operators": [matrix_to_wire(op) for op in p.operators],
    }


def povm_from_wire(data) -> Povm:
    if not isinstance(data, dict):
        raise ValueError("povm document must be a JSON object")
    try:
        dim = int(data["dim"])
        raw_ops = data["operators"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"povm document missing field: {exc}") from None
    if not isinstance(raw_ops, list) or not raw_ops:
        raise ValueError("povm operators must be a non-empty list")
    ops = [matrix_from_wire(op) for op in raw_ops]
    p = make_povm(ops)
    if p.dim != dim:
        raise ValueError(f"declared dim {dim} != operator dim {p.dim}")
    return p


def certificate_to_wire(c: Certificate) -> dict:
    return {
        "dual_value": float(c.dual_value),
        "gap": float(c.gap),
        "feas_margins": [float(v) for v in c.feas_margins],
        "slack_residuals": [float(v) for v in c.slack_residuals],
        "x_hat": matrix_to_wire(c.x_hat),
    }


def certificate_from_wire(data) -> Certificate:
    if not isinstance(data, dict):
        raise ValueError("certificate document must be a JSON object")
    try:
        return Certificate(
            x_hat=matrix_from_wire(data["x_hat"]),
            dual_value=float(data["dual_value"]),
            gap=float(data["gap"]),
            feas_margins=tuple(float(v) for v in data["feas_margins"]),
            slack_residuals=tuple(float(v) for v in data["slack_residuals"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"certificate document missing field: {exc}") from None


def validation_report_to_wire(r: ValidationReport) -> dict:
    return {
        "psd_margins": [float(v) for v in r.psd_margins],
        "trace_deviations": [float(v) for v in r.trace_deviations],
        "hermitian_deviations": [float(v) for v in r.hermitian_deviations],
        "prior_sum_deviation": float(r.prior_sum_deviation),
        "min_prior": float(r.min_prior),
        "span_rank": int(r.span_rank),
        "dim": int(r.dim),
        "passed": bool(r.passed),
    }


def vnm_report_to_wire(r: VnmReport) -> dict:
    return {
        "idempotency_residuals": [float(v) for v in r.idempotency_residuals],
        "orthogonality_residuals": [
            [float(v) for v in row] for row in r.orthogonality_residuals
        ],
        "completeness_residual": float(r.completeness_residual),
        "rank_pairs": None
        if r.rank_pairs is None
        else [
            {
                "state_rank": int(pair.state_rank),
                "povm_rank": int(pair.povm_rank),
                "equal": bool(pair.equal),
                "bounded": bool(pair.bounded),
            }
            for pair in r.rank_pairs
        ],
        "tol": float(r.tol),
        "is_von_neumann": bool(r.is_von_neumann),
    }


def sim_result_to_wire(r: SimResult) -> dict:
    return {
        "trials": int(r.trials),
        "seed": int(r.seed),
        "counts": [[int(v) for v in row] for row in r.counts],
        "empirical_pd": float(r.empirical_pd),
        "std_error": float(r.std_error),
    }


def sim_result_from_wire(data) -> SimResult:
    try:
        return SimResult(
            trials=int(data["trials"]),
            seed=int(data["seed"]),
            counts=np.array(data["counts"], dtype=np.int64),
            empirical_pd=float(data["empirical_pd"]),
            std_error=float(data["std_error"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"simulation document missing field: {exc}") from None


def diagnostics_to_wire(d: SolveDiagnostics) -> dict:
    # Iterate history stays in-process; the wire form is the summary.
    return {
        "iterations": int(d.iterations),
        "primal_value": float(d.primal_value),
        "dual_value": float(d.dual_value),
        "gap": float(d.gap),
        "converged": bool(d.converged),
    }


def solve_result_to_wire(p: Povm, c: Certificate, d: SolveDiagnostics) -> dict:
    return {
        "povm": povm_to_wire(p),
        "certificate": certificate_to_wire(c),
        "diagnostics": diagnostics_to_wire(d),
    }


def solve_result_from_wire(data) -> tuple[Povm, Certificate, dict]:
    if not isinstance(data, dict):
        raise ValueError("solve document must be a JSON object")
    try:
        return (
            povm_from_wire(data["povm"]),
            certificate_from_wire(data["certificate"]),
            dict(data["diagnostics"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"solve document missing field: {exc}") from None
