"""Quantum state ensembles.

An ensemble is a finite set of density operators with strictly positive priors
summing to one. This module validates ensembles, factorizes each density
operator into scaled orthogonal eigenvector columns, tests linear independence
of the collected eigenvectors, assembles the prior-weighted block-column
matrix used by the least-squares measurement, and generates seeded random
ensembles for test corpora.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadPriorsError, BadRanksError

PRIOR_SUM_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
# Density operators are trace-1, so eigenvalue scale is O(1/n) and a relative
# threshold on the largest eigenvalue is the safe rank cut.
RHO_RANK_REL_TOL = 1e-10


@dataclass(frozen=True)
class State:
    """One ensemble member: a prior probability and a density operator."""

    prior: float
    rho: np.ndarray

    def __post_init__(self):
        rho = linalg.as_matrix(self.rho)
        if rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density operator must be square, got {rho.shape}")
        object.__setattr__(self, "prior", float(self.prior))
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class Ensemble:
    """Immutable collection of states on an n-dimensional space."""

    dim: int
    states: tuple[State, ...]

    def __post_init__(self):
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "states", tuple(self.states))
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if not self.states:
            raise ValueError("ensemble needs at least one state")
        for k, s in enumerate(self.states):
            if s.rho.shape != (self.dim, self.dim):
                raise ValueError(
                    f"state {k} has shape {s.rho.shape}, expected "
                    f"({self.dim}, {self.dim})"
                )

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def priors(self) -> np.ndarray:
        return np.array([s.prior for s in self.states])

    @property
    def rhos(self) -> tuple[np.ndarray, ...]:
        return tuple(s.rho for s in self.states)


@dataclass(frozen=True)
class ValidationReport:
    """Per-state and global diagnostics from :func:`validate`."""

    psd_margins: tuple[float, ...]
    trace_deviations: tuple[float, ...]
    hermitian_deviations: tuple[float, ...]
    prior_sum_deviation: float
    min_prior: float
    span_rank: int
    dim: int
    passed: bool


def validate(e: Ensemble) -> ValidationReport:
    """Check ensemble invariants and report every deviation.

    Never raises for bad content; failures are carried in the report. The
    ensemble passes iff all density operators are Hermitian PSD with unit
    trace (within tolerance), priors are positive and sum to one, and the
    state eigenvectors collectively span the full space.
    """
    psd_margins = []
    trace_devs = []
    herm_devs = []
    ok = True
    for s in e.states:
        rho = s.rho
        scale = 1 + linalg.maxabs(rho)
        asym = linalg.maxabs(rho - rho.conj().T)
        herm_devs.append(asym)
        if asym > linalg.HERMITIAN_ASYMMETRY_TOL * scale:
            ok = False
        w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
        min_eig = float(w[0])
        psd_margins.append(min_eig)
        if min_eig < -PSD_TOL * scale:
            ok = False
        tdev = abs(complex(np.trace(rho)) - 1.0)
        trace_devs.append(float(tdev))
        if tdev > TRACE_TOL:
            ok = False

    priors = e.priors
    prior_sum_dev = abs(float(priors.sum()) - 1.0)
    min_prior = float(priors.min())
    if prior_sum_dev > PRIOR_SUM_TOL or min_prior <= 0.0:
        ok = False

    span_rank = linalg.numeric_rank(np.hstack(e.rhos))
    if span_rank != e.dim:
        ok = False

    return ValidationReport(
        psd_margins=tuple(psd_margins),
        trace_deviations=tuple(trace_devs),
        hermitian_deviations=tuple(herm_devs),
        prior_sum_deviation=prior_sum_dev,
        min_prior=min_prior,
        span_rank=span_rank,
        dim=e.dim,
        passed=ok,
    )


@dataclass(frozen=True)
class Factorization:
    """Per-state factors ``phi`` with ``rho = phi @ phi*``.

    Each factor is n x r with mutually orthogonal columns; column k has
    squared norm equal to the k-th kept eigenvalue (descending).
    """

    factors: tuple[np.ndarray, ...]
    ranks: tuple[int, ...]


def factorize(e: Ensemble) -> Factorization:
    """Factor every density operator into scaled eigenvector columns."""
    factors = []
    ranks = []
    for s in e.states:
        r = linalg.numeric_rank(s.rho, RHO_RANK_REL_TOL)
        res = linalg.eig_hermitian(s.rho)
        # eigh is ascending; keep the top r eigenpairs, largest first
        idx = np.argsort(res.values)[::-1][:r]
        vals = np.clip(res.values[idx], 0.0, None)
        phi = res.vectors[:, idx] * np.sqrt(vals)
        factors.append(phi)
        ranks.append(r)
    return Factorization(factors=tuple(factors), ranks=tuple(ranks))


def is_linearly_independent(
    e: Ensemble, f: Factorization | None = None
) -> tuple[bool, int, int]:
    """Whether the collected state eigenvectors are linearly independent.

    Returns ``(flag, span_rank, total_rank)`` where ``span_rank`` is the rank
    of the horizontal concatenation of all factors and ``total_rank`` is the
    sum of state ranks; the flag is true iff the two agree.
    """
    if f is None:
        f = factorize(e)
    span_rank = linalg.numeric_rank(np.hstack(f.factors))
    total_rank = int(sum(f.ranks))
    return span_rank == total_rank, span_rank, total_rank


@dataclass(frozen=True)
class BlockMatrix:
    """Prior-weighted factors placed side by side.

    Block i holds ``sqrt(prior_i) * phi_i`` and starts at column
    ``offsets[i]``.
    """

    psi: np.ndarray
    offsets: tuple[int, ...]
    ranks: tuple[int, ...]

    def block(self, i: int) -> np.ndarray:
        off = self.offsets[i]
        return self.psi[:, off : off + self.ranks[i]]


def build_psi(e: Ensemble, f: Factorization) -> BlockMatrix:
    """Assemble the n x (sum of ranks) block-column matrix."""
    blocks = [
        np.sqrt(s.prior) * phi for s, phi in zip(e.states, f.factors)
    ]
    offsets = []
    off = 0
    for r in f.ranks:
        offsets.append(off)
        off += r
    return BlockMatrix(
        psi=np.hstack(blocks), offsets=tuple(offsets), ranks=tuple(f.ranks)
    )


def selector(i: int, ranks) -> np.ndarray:
    """Column-selection matrix for block i (0-based).

    The result has shape (sum of ranks) x ranks[i], all zeros except a single
    1 per column placed so that ``psi @ selector(i, ranks)`` picks out block i
    exactly. Selectors for different blocks are mutually orthogonal:
    ``selector(i)* @ selector(j)`` is the identity when i == j and zero
    otherwise.
    """
    ranks = [int(r) for r in ranks]
    if not 0 <= i < len(ranks):
        raise IndexError(f"block index {i} out of range for {len(ranks)} blocks")
    total = sum(ranks)
    off = sum(ranks[:i])
    sel = np.zeros((total, ranks[i]), dtype=np.complex128)
    for q in range(ranks[i]):
        sel[off + q, q] = 1.0
    return sel


def _resolve_priors(priors, m: int) -> tuple[float, ...]:
    if isinstance(priors, str):
        if priors != "uniform":
            raise BadPriorsError(f"unrecognized priors value {priors!r}")
        # last prior absorbs the float residue so the sum is exactly 1
        vals = [1.0 / m] * m
        vals[-1] = 1.0 - sum(vals[:-1])
        return tuple(vals)
    vals = tuple(float(p) for p in priors)
    if len(vals) != m:
        raise BadPriorsError(f"got {len(vals)} priors for {m} states")
    if any(p <= 0.0 for p in vals):
        raise BadPriorsError("priors must be strictly positive")
    if abs(sum(vals) - 1.0) > PRIOR_SUM_TOL:
        raise BadPriorsError(f"priors sum to {sum(vals)!r}, expected 1")
    return vals


def _complex_normal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    # Draw (rows, cols, 2) in C order: entry-minor, real before imaginary.
    draws = rng.standard_normal((rows, cols, 2))
    return draws[..., 0] + 1j * draws[..., 1]


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = _complex_normal(rng, n, n)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_ensemble(
    dim: int,
    ranks,
    priors="uniform",
    seed: int = 0,
    require_independent: bool = False,
) -> Ensemble:
    """Generate a seeded random ensemble with the given state ranks.

    Each density operator is ``A A* / trace(A A*)`` for an n x r complex
    standard-normal matrix A. With ``require_independent`` the A blocks are
    disjoint column blocks of a random invertible basis built as
    U1 diag(s) U2* from two Haar-random unitaries and singular values drawn
    in [0.35, 1], so the state supports are generically non-orthogonal but
    linearly independent by construction (and well conditioned, keeping every
    state's numeric rank exact); the ranks must then sum to ``dim``.

    Deterministic for a fixed seed: the PRNG is numpy's PCG64 and the draw
    order is state-index major, matrix-entry minor, real part before
    imaginary part (the basis for the independent case is drawn first, as
    first unitary, then singular values, then second unitary).
    """
    ranks = tuple(int(r) for r in ranks)
    if not ranks or any(r < 1 for r in ranks):
        raise BadRanksError(f"ranks must all be >= 1, got {ranks}")
    if require_independent and sum(ranks) != dim:
        raise BadRanksError(
            f"independent ensembles need ranks summing to dim={dim}, "
            f"got sum {sum(ranks)}"
        )
    p = _resolve_priors(priors, len(ranks))
    rng = np.random.default_rng(seed)

    blocks: list[np.ndarray] = []
    if require_independent:
        u1 = _haar_unitary(dim, rng)
        s = rng.uniform(0.35, 1.0, size=dim)
        u2 = _haar_unitary(dim, rng)
        basis = (u1 * s) @ u2.conj().T
        off = 0
        for r in ranks:
            blocks.append(basis[:, off : off + r])
            off += r
    else:
        for r in ranks:
            blocks.append(_complex_normal(rng, dim, r))

    states = []
    for prior, a in zip(p, blocks):
        rho = a @ a.conj().T
        rho = (rho + rho.conj().T) / 2
        rho /= float(np.trace(rho).real)
        states.append(State(prior=prior, rho=rho))
    return Ensemble(dim=dim, states=tuple(states))


def deflate(e: Ensemble) -> tuple[Ensemble, np.ndarray]:
    """Re-express an ensemble on the subspace its states actually span.

    Returns the reduced ensemble together with the n x k orthonormal basis B
    of the spanned subspace, so each new density operator is ``B* rho B``.
    The identity deflation (k == n) is allowed and harmless.
    """
    concat = np.hstack(e.rhos)
    k = linalg.numeric_rank(concat)
    u, _, _ = np.linalg.svd(concat)
    basis = u[:, :k]
    states = []
    for s in e.states:
        rho = basis.conj().T @ s.rho @ basis
        rho = (rho + rho.conj().T) / 2
        states.append(State(prior=s.prior, rho=rho))
    return Ensemble(dim=k, states=tuple(states)), basis
