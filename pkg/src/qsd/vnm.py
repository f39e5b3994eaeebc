"""Von Neumann structure checks for measurements.

A POVM is a Von Neumann measurement when its operators are mutually
orthogonal projections. These checks make that structural claim executable:
idempotency and pairwise-orthogonality residuals, rank comparisons against
the state ranks, and the direct-sum rank of the operator ranges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .ensemble import Ensemble
from .errors import CountMismatchError, DimMismatchError
from .lsm import Povm

# Projector spectra are bimodal (near 0 or 1), so an absolute eigenvalue cut
# is safe for extracting range bases.
RANGE_EIG_TOL = 1e-8


@dataclass(frozen=True)
class PovmCheck:
    """Positivity margins and completeness residual of a candidate POVM."""

    psd_margins: tuple[float, ...]
    completeness_residual: float
    tol: float
    passed: bool


def check_povm(p: Povm, tol: float = 1e-8) -> PovmCheck:
    """Verify PSD-ness of each operator and that they sum to the identity."""
    margins = []
    ok = True
    for op in p.operators:
        if op.shape != (p.dim, p.dim):
            raise DimMismatchError(f"operator shape {op.shape} != dim {p.dim}")
        scale = 1 + linalg.maxabs(op)
        w = np.linalg.eigvalsh(linalg.hermitian_part(op))
        margins.append(float(w[0]))
        if float(w[0]) < -tol * scale:
            ok = False
    total = np.zeros((p.dim, p.dim), dtype=np.complex128)
    for op in p.operators:
        total += op
    completeness = linalg.maxabs(total - np.eye(p.dim))
    if completeness > tol:
        ok = False
    return PovmCheck(
        psd_margins=tuple(margins),
        completeness_residual=completeness,
        tol=tol,
        passed=ok,
    )


class RankPair(NamedTuple):
    state_rank: int
    povm_rank: int
    equal: bool
    bounded: bool


@dataclass(frozen=True)
class VnmReport:
    """Residuals behind a Von Neumann verdict.

    ``orthogonality_residuals`` is an m x m matrix with zeros on the
    diagonal; entry (i, j) is the largest entry magnitude of Pi_i @ Pi_j.
    ``rank_pairs`` is filled only when an ensemble was supplied.
    """

    idempotency_residuals: tuple[float, ...]
    orthogonality_residuals: np.ndarray
    completeness_residual: float
    rank_pairs: tuple[RankPair, ...] | None
    tol: float
    is_von_neumann: bool


def is_projective(p: Povm, tol: float = 1e-6) -> VnmReport:
    """Whether the POVM consists of mutually orthogonal projections.

    The verdict is true iff every idempotency residual ||Pi^2 - Pi||, every
    pairwise residual ||Pi_i Pi_j|| (i != j) and the completeness residual
    are all within ``tol``.
    """
    m = p.num_outcomes
    idem = tuple(
        linalg.maxabs(op @ op - op) for op in p.operators
    )
    orth = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if i != j:
                orth[i, j] = linalg.maxabs(p.operators[i] @ p.operators[j])
    completeness = check_povm(p, tol).completeness_residual
    verdict = (
        all(r <= tol for r in idem)
        and float(orth.max(initial=0.0)) <= tol
        and completeness <= tol
    )
    return VnmReport(
        idempotency_residuals=idem,
        orthogonality_residuals=orth,
        completeness_residual=completeness,
        rank_pairs=None,
        tol=tol,
        is_von_neumann=verdict,
    )


def rank_profile(e: Ensemble, p: Povm) -> tuple[RankPair, ...]:
    """Compare each measurement operator's rank against its state's rank."""
    if e.dim != p.dim:
        raise DimMismatchError(f"ensemble dim {e.dim} != povm dim {p.dim}")
    if e.num_states != p.num_outcomes:
        raise CountMismatchError(
            f"{e.num_states} states vs {p.num_outcomes} outcomes"
        )
    pairs = []
    for s, op in zip(e.states, p.operators):
        r = linalg.numeric_rank(s.rho)
        t = linalg.numeric_rank(op)
        pairs.append(RankPair(state_rank=r, povm_rank=t, equal=t == r, bounded=t <= r))
    return tuple(pairs)


def vnm_report(e: Ensemble, p: Povm, tol: float = 1e-6) -> VnmReport:
    """Full report: projectivity residuals plus the rank comparison."""
    base = is_projective(p, tol)
    return VnmReport(
        idempotency_residuals=base.idempotency_residuals,
        orthogonality_residuals=base.orthogonality_residuals,
        completeness_residual=base.completeness_residual,
        rank_pairs=rank_profile(e, p),
        tol=tol,
        is_von_neumann=base.is_von_neumann,
    )


def direct_sum_rank(p: Povm, eig_tol: float = RANGE_EIG_TOL) -> int:
    """Rank of the concatenated range bases of all operators.

    Equals the space dimension exactly when the operator ranges decompose the
    space as a direct sum.
    """
    bases = []
    for op in p.operators:
        res = linalg.eig_hermitian(op)
        keep = res.values > eig_tol
        if np.any(keep):
            bases.append(res.vectors[:, keep])
    if not bases:
        return 0
    return linalg.numeric_rank(np.hstack(bases))
