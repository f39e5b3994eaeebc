"""Optimal and least-squares measurements for distinguishing mixed quantum
states, with executable verification that both are Von Neumann measurements
on linearly independent ensembles.
"""

from .ensemble import (
    BlockMatrix,
    Ensemble,
    Factorization,
    State,
    ValidationReport,
    build_psi,
    deflate,
    factorize,
    is_linearly_independent,
    random_ensemble,
    selector,
    validate,
)
from .errors import (
    BadPriorsError,
    BadRanksError,
    CountMismatchError,
    DimMismatchError,
    NonSquareError,
    NotBinaryError,
    NotConvergedError,
    NotHermitianError,
    NotPsdError,
    QsdError,
    SingularMatrixError,
    SpanDeficientError,
)
from .linalg import (
    EigResult,
    eig_hermitian,
    inv_sqrt_psd,
    is_psd,
    numeric_rank,
    sqrt_psd,
    trace_norm,
)
from .lsm import Povm, compute_lsm, lsm_is_projective_expected, make_povm
from .optimal import (
    Certificate,
    SolveDiagnostics,
    certify,
    helstrom_binary,
    prob_correct,
    solve_optimal,
)
from .sim import ConfusionMatrix, SimResult, born_probabilities, simulate
from .vnm import (
    PovmCheck,
    RankPair,
    VnmReport,
    check_povm,
    direct_sum_rank,
    is_projective,
    rank_profile,
    vnm_report,
)

__version__ = "0.1.0"

__all__ = [
    "BadPriorsError",
    "BadRanksError",
    "BlockMatrix",
    "Certificate",
    "ConfusionMatrix",
    "CountMismatchError",
    "DimMismatchError",
    "EigResult",
    "Ensemble",
    "Factorization",
    "NonSquareError",
    "NotBinaryError",
    "NotConvergedError",
    "NotHermitianError",
    "NotPsdError",
    "Povm",
    "PovmCheck",
    "QsdError",
    "RankPair",
    "SimResult",
    "SingularMatrixError",
    "SolveDiagnostics",
    "SpanDeficientError",
    "State",
    "ValidationReport",
    "VnmReport",
    "born_probabilities",
    "build_psi",
    "certify",
    "check_povm",
    "compute_lsm",
    "deflate",
    "direct_sum_rank",
    "eig_hermitian",
    "factorize",
    "helstrom_binary",
    "inv_sqrt_psd",
    "is_linearly_independent",
    "is_projective",
    "is_psd",
    "lsm_is_projective_expected",
    "make_povm",
    "numeric_rank",
    "prob_correct",
    "random_ensemble",
    "rank_profile",
    "selector",
    "simulate",
    "solve_optimal",
    "sqrt_psd",
    "trace_norm",
    "validate",
    "vnm_report",
]
