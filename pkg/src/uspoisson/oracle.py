"""Slow, dense reference computations for tests and the --oracle mode."""
# Created: 2026-10-18

import logging

import numpy as np
from scipy.linalg import eigvals, lu_factor, lu_solve

from .adi import SylvesterSystem
from .banded import BandedMatrix, band_lu, band_solve
from .errors import OracleSizeError, ShiftCollisionError, SingularMatrixError
from .spectra import dominant_eigenvalue
from .zolotarev import ShiftSchedule

logger = logging.getLogger(__name__)

KRON_MAX_N = 64
EIG_MAX_N = 512
LARGEST = "largest"
SMALLEST = "smallest"
POWER_MAX_ITERS = 5000


def kron_solve(sys: SylvesterSystem) -> np.ndarray:
    """Solve (B2^T kron A1 + B1^T kron A2) vec(X) = vec(F) densely."""
    n = sys.n
    if n > KRON_MAX_N:
        raise OracleSizeError(f"Kronecker oracle refuses n={n} > {KRON_MAX_N}")
    K = (np.kron(sys.B2.to_dense().T, sys.A1.to_dense())
         + np.kron(sys.B1.to_dense().T, sys.A2.to_dense()))
    lu, piv = lu_factor(K, check_finite=True)
    zero = np.flatnonzero(np.diag(lu) == 0)
    if zero.size:
        raise SingularMatrixError(int(zero[0]), "Kronecker system is singular")
    x = lu_solve((lu, piv), sys.F_dense.reshape(-1, order='F'))
    return x.reshape((n, n), order='F')


def extreme_eigs(A1: BandedMatrix, A2: BandedMatrix, which: str = LARGEST,
                 tol: float = 1e-8) -> float:
    """Largest- or smallest-magnitude real eigenvalue of A2^{-1} A1.

    Banded LU with power iteration (``largest``) or inverse iteration
    (``smallest``) from the alternating-sign start vector.
    """
    n = A1.nrows
    if n > EIG_MAX_N:
        raise OracleSizeError(f"Eigenvalue oracle refuses n={n} > {EIG_MAX_N}")
    if which == LARGEST:
        lu2 = band_lu(A2)
        return dominant_eigenvalue(
            lambda v: band_solve(lu2, A1.dot(v)), n, POWER_MAX_ITERS, tol
        )
    if which == SMALLEST:
        lu1 = band_lu(A1)
        inverse = dominant_eigenvalue(
            lambda v: band_solve(lu1, A2.dot(v)), n, POWER_MAX_ITERS, tol
        )
        return 1.0 / inverse
    raise ValueError(f"which must be {LARGEST!r} or {SMALLEST!r}, not {which!r}")


def pencil_eigenvalues(A1: BandedMatrix, A2: BandedMatrix) -> np.ndarray:
    """All eigenvalues of A2^{-1} A1 (QZ), sorted by real part."""
    if A1.nrows > EIG_MAX_N:
        raise OracleSizeError(f"Eigenvalue oracle refuses n={A1.nrows} > {EIG_MAX_N}")
    values = eigvals(A1.to_dense(), A2.to_dense())
    return np.sort_complex(values)


def scalar_adi(lam: float, mu: float, shifts: ShiftSchedule) -> float:
    """prod_j (lam - q_j)(mu - p_j) / ((lam - p_j)(mu - q_j)) = s(lam) / s(mu)."""
    factor = 1.0
    for j, (p, q) in enumerate(zip(shifts.p, shifts.q)):
        if lam == p or mu == q:
            raise ShiftCollisionError(j)
        factor *= (lam - q) * (mu - p) / ((lam - p) * (mu - q))
    return factor


def sampled_error_factor(shifts: ShiftSchedule, samples: int = 1000) -> float:
    """max |s(lam)| over [a, b] divided by min |s(mu)| over [c, d]."""
    (a, b), (c, d) = shifts.intervals
    lam = np.linspace(a, b, samples)
    mu = np.linspace(c, d, samples)
    return float(np.max(np.abs(shifts.rational(lam))) / np.min(np.abs(shifts.rational(mu))))
