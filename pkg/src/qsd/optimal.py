"""Minimum-error measurement optimization.

The primal problem maximizes the probability of correct detection
``sum_i p_i Tr(rho_i Pi_i)`` over POVMs. Its dual minimizes ``Tr(X)`` over
Hermitian X dominating every weighted state ``p_i rho_i``; a measurement is
globally optimal if and only if some feasible X is complementary-slack with
it, i.e. ``(X - p_i rho_i) Pi_i = 0`` for every i. That certificate, not any
particular algorithm, is the contract here.

The default solver is a completeness-preserving fixed-point ascent on the
measurement operators: with G_i = p_i rho_i, form Lambda = sum_j G_j Pi_j G_j
and update Pi_i <- Lambda^{-1/2} G_i Pi_i G_i Lambda^{-1/2}. The update keeps
the operators PSD and summing to the identity by construction, and its fixed
points satisfy the slackness conditions. Iteration stops once the certificate
built from X = herm(sum_j G_j Pi_j) passes feasibility and slackness at the
requested tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .ensemble import Ensemble, validate
from .errors import (
    CountMismatchError,
    DimMismatchError,
    NotBinaryError,
    SingularMatrixError,
    SpanDeficientError,
)
from .lsm import Povm, compute_lsm, make_povm

# Lambda eigenvalues below this (relative to maxabs) get a 1e-12 identity
# shift before inversion; guards rank-deficient iterates.
LAMBDA_FLOOR = 1e-12


@dataclass(frozen=True)
class Certificate:
    """Dual operator with its feasibility margins and slackness residuals.

    ``feas_margins[i]`` is the smallest eigenvalue of ``x_hat - p_i rho_i``
    (nonnegative means the dual constraint holds); ``slack_residuals[i]`` is
    the largest entry magnitude of ``(x_hat - p_i rho_i) Pi_i``. A feasible
    and slack certificate proves the measurement globally optimal.
    """

    x_hat: np.ndarray
    dual_value: float
    gap: float
    feas_margins: tuple[float, ...]
    slack_residuals: tuple[float, ...]

    def feasible_at(self, tol: float) -> bool:
        return min(self.feas_margins) >= -tol

    def slack_at(self, tol: float) -> bool:
        return max(self.slack_residuals) <= tol

    def optimal_at(self, tol: float) -> bool:
        return self.feasible_at(tol) and self.slack_at(tol)


@dataclass(frozen=True)
class IterateRecord:
    """One solver iterate's certificate summary, for duality audits."""

    iteration: int
    primal_value: float
    dual_value: float
    gap: float
    min_feas_margin: float
    max_slack_residual: float


@dataclass(frozen=True)
class SolveDiagnostics:
    iterations: int
    primal_value: float
    dual_value: float
    gap: float
    converged: bool
    history: tuple[IterateRecord, ...]


def prob_correct(e: Ensemble, p: Povm) -> float:
    """Probability of correct detection: sum_i p_i Tr(rho_i Pi_i)."""
    if e.dim != p.dim:
        raise DimMismatchError(f"ensemble dim {e.dim} != povm dim {p.dim}")
    if e.num_states != p.num_outcomes:
        raise CountMismatchError(
            f"{e.num_states} states vs {p.num_outcomes} outcomes"
        )
    total = 0.0
    for s, op in zip(e.states, p.operators):
        total += s.prior * float(np.trace(s.rho @ op).real)
    return total


def helstrom_binary(e: Ensemble) -> float:
    """Closed-form optimum for two states: (1 + ||p1 rho1 - p2 rho2||_1) / 2.

    Independent oracle for cross-checking the iterative solver; never used
    inside it.
    """
    if e.num_states != 2:
        raise NotBinaryError(f"need exactly 2 states, got {e.num_states}")
    s1, s2 = e.states
    delta = s1.prior * s1.rho - s2.prior * s2.rho
    return 0.5 * (1.0 + linalg.trace_norm(delta))


def certify(e: Ensemble, p: Povm, x_hat, tol: float = 1e-7) -> Certificate:
    """Evaluate the optimality certificate of a candidate dual operator.

    Computes all feasibility margins and slackness residuals without mutating
    the inputs. ``tol`` is only a convenience for callers that immediately
    test ``optimal_at``; the certificate itself carries raw residuals.
    """
    x_hat = linalg.as_matrix(x_hat)
    if x_hat.shape != (e.dim, e.dim):
        raise DimMismatchError(
            f"dual operator has shape {x_hat.shape}, expected ({e.dim}, {e.dim})"
        )
    if e.dim != p.dim:
        raise DimMismatchError(f"ensemble dim {e.dim} != povm dim {p.dim}")
    if e.num_states != p.num_outcomes:
        raise CountMismatchError(
            f"{e.num_states} states vs {p.num_outcomes} outcomes"
        )
    x_hat = linalg.hermitian_part(x_hat)
    margins = []
    slacks = []
    for s, op in zip(e.states, p.operators):
        diff = x_hat - s.prior * s.rho
        margins.append(float(np.linalg.eigvalsh(linalg.hermitian_part(diff))[0]))
        slacks.append(linalg.maxabs(diff @ op))
    dual = float(np.trace(x_hat).real)
    gap = dual - prob_correct(e, p)
    return Certificate(
        x_hat=x_hat,
        dual_value=dual,
        gap=gap,
        feas_margins=tuple(margins),
        slack_residuals=tuple(slacks),
    )


def _dual_candidate(g: list[np.ndarray], ops: list[np.ndarray]) -> np.ndarray:
    acc = np.zeros_like(g[0])
    for gi, pi in zip(g, ops):
        acc += gi @ pi
    return linalg.hermitian_part(acc)


def _regularized_inv_sqrt(lam: np.ndarray) -> np.ndarray:
    lam = linalg.hermitian_part(lam)
    w, v = np.linalg.eigh(lam)
    if float(w[0]) < LAMBDA_FLOOR * linalg.maxabs(lam):
        w = w + LAMBDA_FLOOR
    if float(w[0]) <= 0.0:
        raise SingularMatrixError("iteration map collapsed to a singular operator")
    return linalg.hermitian_part((v / np.sqrt(w)) @ v.conj().T)


def solve_optimal(
    e: Ensemble, tol: float = 1e-8, max_iter: int = 10000
) -> tuple[Povm, Certificate, SolveDiagnostics]:
    """Solve for the measurement maximizing the detection probability.

    Starts from the least-squares measurement (already optimal for symmetric
    ensembles, so a fixed point there) and runs the fixed-point ascent until
    the certificate passes at ``tol`` or the iteration budget runs out. On
    exhaustion the best iterate seen is returned with ``converged=False``
    rather than raising; hard instances are diagnosed, not aborted.
    """
    report = validate(e)
    if report.span_rank < e.dim:
        raise SpanDeficientError(report.span_rank, e.dim)
    if not report.passed:
        raise ValueError("ensemble failed validation; run validate() for details")

    g = [linalg.hermitian_part(s.prior * s.rho) for s in e.states]
    ops = [np.array(op) for op in compute_lsm(e).operators]

    history: list[IterateRecord] = []
    best_score = np.inf
    best: tuple[list[np.ndarray], np.ndarray, float, float, int] | None = None
    converged = False
    iteration = 0

    while True:
        x_hat = _dual_candidate(g, ops)
        primal = 0.0
        for s, pi in zip(e.states, ops):
            primal += s.prior * float(np.trace(s.rho @ pi).real)
        dual = float(np.trace(x_hat).real)

        min_margin = np.inf
        max_slack = 0.0
        for gi, pi in zip(g, ops):
            diff = x_hat - gi
            min_margin = min(
                min_margin, float(np.linalg.eigvalsh(linalg.hermitian_part(diff))[0])
            )
            max_slack = max(max_slack, linalg.maxabs(diff @ pi))

        history.append(
            IterateRecord(
                iteration=iteration,
                primal_value=primal,
                dual_value=dual,
                gap=dual - primal,
                min_feas_margin=min_margin,
                max_slack_residual=max_slack,
            )
        )

        score = max(-min_margin, max_slack, 0.0)
        if score < best_score:
            best_score = score
            best = ([pi.copy() for pi in ops], x_hat, primal, dual, iteration)

        if min_margin >= -tol and max_slack <= tol:
            converged = True
            best = (ops, x_hat, primal, dual, iteration)
            break
        if iteration >= max_iter:
            break

        lam = np.zeros_like(x_hat)
        for gi, pi in zip(g, ops):
            lam += gi @ pi @ gi
        s_inv = _regularized_inv_sqrt(lam)
        ops = [
            linalg.hermitian_part((s_inv @ gi) @ pi @ (gi @ s_inv))
            for gi, pi in zip(g, ops)
        ]
        iteration += 1

    assert best is not None
    ops_out, x_out, primal_out, dual_out, _ = best
    povm = make_povm(ops_out)
    cert = certify(e, povm, x_out, tol)
    diag = SolveDiagnostics(
        iterations=iteration,
        primal_value=primal_out,
        dual_value=dual_out,
        gap=dual_out - primal_out,
        converged=converged,
        history=tuple(history),
    )
    return povm, cert, diag
