"""ADI and factored ADI for A1 X B2 + A2 X B1 = F.

Both iterations work with the pencils A = A2^{-1} A1 and B = B1 B2^{-1}
without ever forming an inverse: every step is a pair of banded LU solves
against (A1 - p A2) and (B1 + q B2).
"""
# Created: 2026-10-18

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from .banded import BandedLU, BandedMatrix, band_add_scaled, band_lu, band_solve
from .errors import DimensionError, DivergenceError, ShiftCollisionError, SingularMatrixError
from .recomb import TransformOp
from .zolotarev import ShiftSchedule

logger = logging.getLogger(__name__)

DEFAULT_CHECK_EVERY = 10
STAGNATION_RATIO = 0.1
TINY_SHIFT_FACTOR = 4.0
SYMMETRY_TOL = 1e-12

TOLERANCE = "tolerance"
STAGNATION = "stagnation"
EXHAUSTED = "schedule-exhausted"


@dataclass
class LowRankRHS:
    """F = U V^T with r columns in each factor."""
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self) -> None:
        self.U = np.atleast_2d(np.asarray(self.U, dtype=float))
        self.V = np.atleast_2d(np.asarray(self.V, dtype=float))
        if self.U.ndim != 2 or self.U.shape[1] != self.V.shape[1]:
            raise DimensionError(f"Factor shapes {self.U.shape} and {self.V.shape} disagree")
        if self.U.shape[1] < 1:
            raise DimensionError("Low-rank factors need at least one column")
        if not (np.all(np.isfinite(self.U)) and np.all(np.isfinite(self.V))):
            raise DivergenceError("Low-rank factors must be finite")

    @property
    def r(self) -> int:
        return self.U.shape[1]

    def to_dense(self) -> np.ndarray:
        return self.U @ self.V.T


@dataclass
class LowRankSolution:
    """X = Z diag(D) Y^T, one block of r columns per ADI step."""
    Z: np.ndarray
    Y: np.ndarray
    D: np.ndarray

    @property
    def rank(self) -> int:
        return self.Z.shape[1]

    def to_dense(self) -> np.ndarray:
        return (self.Z * self.D[None, :]) @ self.Y.T


@dataclass
class SolveReport:
    """What an ADI run did and why it stopped."""
    iterations_run: int = 0
    increment_history: List[Tuple[int, float]] = field(default_factory=list)
    terminated_by: str = EXHAUSTED
    wall_time: float = 0.0
    skipped_shifts: List[int] = field(default_factory=list)
    n: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "iterations_run": self.iterations_run,
            "terminated_by": self.terminated_by,
            "wall_time": self.wall_time,
            "skipped_shifts": list(self.skipped_shifts),
            "increment_history": [list(item) for item in self.increment_history],
        }


@dataclass
class SylvesterSystem:
    """A1 X B2 + A2 X B1 = F on n x n coefficient matrices.

    ``back_transforms`` holds the (y, x) recombination transforms that map
    the solution back to Chebyshev coefficients: U = T_y X T_x^T.
    """
    A1: BandedMatrix
    B1: BandedMatrix
    A2: BandedMatrix
    B2: BandedMatrix
    F: Union[np.ndarray, LowRankRHS]
    back_transforms: Optional[Tuple[TransformOp, TransformOp]] = None
    symmetric: bool = False

    def __post_init__(self) -> None:
        n = self.A1.nrows
        for name in ("A1", "B1", "A2", "B2"):
            if getattr(self, name).shape != (n, n):
                raise DimensionError(f"{name} has shape {getattr(self, name).shape}, expected ({n}, {n})")
        f_shape = (self.F.U.shape[0], self.F.V.shape[0]) if isinstance(self.F, LowRankRHS) else np.shape(self.F)
        if tuple(f_shape) != (n, n):
            raise DimensionError(f"Right-hand side has shape {f_shape}, expected ({n}, {n})")
        if self.symmetric:
            for left, right in (("A1", "B1"), ("A2", "B2")):
                gap = abs(getattr(self, left).to_csr() - getattr(self, right).to_csr().T).max()
                if gap > SYMMETRY_TOL * max(abs(getattr(self, left).data).max(), 1.0):
                    raise DimensionError(f"Declared symmetric but {left} != {right}^T (gap {gap:.3e})")

    @property
    def n(self) -> int:
        return self.A1.nrows

    @property
    def F_dense(self) -> np.ndarray:
        return self.F.to_dense() if isinstance(self.F, LowRankRHS) else np.asarray(self.F, dtype=float)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """A1 X B2 + A2 X B1."""
        return self.B2.rdot(self.A1.dot(X)) + self.B1.rdot(self.A2.dot(X))

    def residual(self, X: np.ndarray) -> float:
        """Frobenius norm of the residual."""
        return float(np.linalg.norm(self.apply(X) - self.F_dense))


def adi_solve(
    sys: SylvesterSystem,
    shifts: ShiftSchedule,
    X0: Optional[np.ndarray] = None,
    eps: float = 1e-13,
    check_every: int = DEFAULT_CHECK_EVERY,
) -> Tuple[np.ndarray, SolveReport]:
    """Run the shift schedule once, stopping early on the increment test.

    The iterate is carried as X_hat = A2 X so each step needs only the two
    shifted factorizations; X itself is recovered with one A2 solve.
    """
    if len(shifts) == 0:
        raise ValueError("Shift schedule is empty")
    if check_every < 1:
        raise ValueError(f"Check cadence must be >= 1, got {check_every}")
    n = sys.n
    start = time.perf_counter()
    report = SolveReport(n=n)
    F = sys.F_dense
    lu_a2 = _factor(sys.A2, -1)

    X = np.zeros((n, n)) if X0 is None else np.asarray(X0, dtype=float)
    if X.shape != (n, n):
        raise DimensionError(f"Initial iterate has shape {X.shape}, expected ({n}, {n})")
    X_hat = sys.A2.dot(X)
    active = _active_shifts(shifts, report)

    for step, j in enumerate(active, start=1):
        p, q = shifts.p[j], shifts.q[j]
        left = _factor(band_add_scaled(sys.A1, sys.A2, -p), j)
        right = _factor(band_add_scaled(sys.B1, sys.B2, q), j)
        # half step: (A1 - p A2) Z = F - X_hat (B1 + p B2)
        rhs = F - sys.B1.rdot(X_hat) - p * sys.B2.rdot(X_hat)
        Z = band_solve(left, rhs, 'left')
        # full step: X_hat (B1 + q B2) = F - (A1 - q A2) Z
        rhs = F - sys.A1.dot(Z) + q * sys.A2.dot(Z)
        previous = X_hat
        X_hat = band_solve(right, rhs, 'right')
        if not np.all(np.isfinite(X_hat)):
            raise DivergenceError(f"Non-finite iterate after shift {j}")
        report.iterations_run = step

        if _is_check(step, check_every, len(active)):
            X = band_solve(lu_a2, X_hat, 'left')
            delta = band_solve(lu_a2, X_hat - previous, 'left')
            increment = _relative(np.linalg.norm(delta), np.linalg.norm(X))
            if _record(report, step, increment, eps):
                break

    X = band_solve(lu_a2, X_hat, 'left')
    report.wall_time = time.perf_counter() - start
    logger.info(
        f"ADI n={n}: {report.iterations_run} iterations, stopped by {report.terminated_by}"
    )
    return X, report


def fadi_solve(
    sys: SylvesterSystem,
    shifts: ShiftSchedule,
    eps: float = 1e-13,
    check_every: int = DEFAULT_CHECK_EVERY,
) -> Tuple[LowRankSolution, SolveReport]:
    """Factored ADI: build X = sum_j (q_j - p_j) Z_j Y_j^T from F = U V^T.

    Z_{j+1} = Z_j + (p_{j+1} - q_j) (A1 - p_{j+1} A2)^{-1} A2 Z_j
    Y_{j+1} = Y_j + (p_j - q_{j+1}) (B1 + q_{j+1} B2)^{-T} B2^T Y_j
    """
    if not isinstance(sys.F, LowRankRHS):
        raise TypeError("fadi_solve needs a LowRankRHS right-hand side")
    if len(shifts) == 0:
        raise ValueError("Shift schedule is empty")
    if check_every < 1:
        raise ValueError(f"Check cadence must be >= 1, got {check_every}")
    n, r = sys.n, sys.F.r
    start = time.perf_counter()
    report = SolveReport(n=n)
    active = _active_shifts(shifts, report)
    if len(active) * r >= n:
        logger.warning(
            f"fADI with k*r = {len(active) * r} >= n = {n} stores more than a dense solve"
        )

    Z_blocks: List[np.ndarray] = []
    Y_blocks: List[np.ndarray] = []
    weights: List[float] = []
    Z = Y = None
    p_prev = q_prev = None
    for step, j in enumerate(active, start=1):
        p, q = shifts.p[j], shifts.q[j]
        left = _factor(band_add_scaled(sys.A1, sys.A2, -p), j)
        right = _factor(band_add_scaled(sys.B1, sys.B2, q), j)
        if Z is None:
            Z = band_solve(left, sys.F.U, 'left')
            Y = band_solve(right, sys.F.V.T, 'right').T
        else:
            Z = Z + (p - q_prev) * band_solve(left, sys.A2.dot(Z), 'left')
            Y = Y + (p_prev - q) * band_solve(right, sys.B2.rdot(Y.T), 'right').T
        if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(Y))):
            raise DivergenceError(f"Non-finite factor after shift {j}")
        Z_blocks.append(Z)
        Y_blocks.append(Y)
        weights.extend([q - p] * r)
        p_prev, q_prev = p, q
        report.iterations_run = step

        if _is_check(step, check_every, len(active)):
            change = abs(q - p) * _product_norm(Z, Y)
            total = _product_norm(np.hstack(Z_blocks), np.hstack(Y_blocks), np.asarray(weights))
            if _record(report, step, _relative(change, total), eps):
                break

    report.wall_time = time.perf_counter() - start
    logger.info(
        f"fADI n={n} r={r}: {report.iterations_run} iterations, stopped by {report.terminated_by}"
    )
    return LowRankSolution(np.hstack(Z_blocks), np.hstack(Y_blocks), np.asarray(weights)), report


def warm_restart(Xprev: np.ndarray, n2: int) -> np.ndarray:
    """Zero-pad an n1 x n1 iterate to n2 x n2."""
    Xprev = np.asarray(Xprev, dtype=float)
    n1 = Xprev.shape[0]
    if n2 < n1:
        raise DimensionError(f"Cannot restart from size {n1} at smaller size {n2}")
    out = np.zeros((n2, n2))
    out[:n1, :n1] = Xprev
    return out


def _factor(M: BandedMatrix, index: int) -> BandedLU:
    try:
        return band_lu(M)
    except SingularMatrixError as e:
        if index < 0:
            raise
        raise ShiftCollisionError(
            index, f"Shift {index} makes the shifted matrix singular (column {e.column})"
        ) from e


def _active_shifts(shifts: ShiftSchedule, report: SolveReport) -> List[int]:
    """Indices of shifts large enough to use; tiny ones are skipped."""
    scale = max(abs(v) for pair in shifts.intervals for v in pair)
    floor = TINY_SHIFT_FACTOR * np.finfo(float).eps * scale
    active = []
    for j, (p, q) in enumerate(zip(shifts.p, shifts.q)):
        if min(abs(p), abs(q)) < floor:
            logger.warning(f"Skipping shift {j}: |p|={abs(p):.3e}, |q|={abs(q):.3e} below {floor:.3e}")
            report.skipped_shifts.append(j)
        else:
            active.append(j)
    if not active:
        raise ShiftCollisionError(0, "Every shift in the schedule is below machine precision")
    return active


def _is_check(step: int, check_every: int, total: int) -> bool:
    return step == 1 or step % check_every == 0 or step == total


def _relative(change: float, size: float) -> float:
    if size == 0:
        return 0.0 if change == 0 else float('inf')
    return float(change / size)


def _record(report: SolveReport, step: int, increment: float, eps: float) -> bool:
    """Log a check and decide whether to stop."""
    history = report.increment_history
    history.append((step, increment))
    logger.debug(f"Iteration {step}: relative increment {increment:.3e}")
    if increment <= eps:
        report.terminated_by = TOLERANCE
        return True
    if len(history) >= 2:
        last = history[-2][1]
        if last > eps and abs(increment - last) < STAGNATION_RATIO * last:
            report.terminated_by = STAGNATION
            logger.warning(
                f"ADI stagnated at iteration {step}: increment {increment:.3e} after {last:.3e}"
            )
            return True
    return False


def _product_norm(Z: np.ndarray, Y: np.ndarray, D: Optional[np.ndarray] = None) -> float:
    """||Z diag(D) Y^T||_F from the triangular QR factors."""
    Rz = np.linalg.qr(Z, mode='r')
    Ry = np.linalg.qr(Y, mode='r')
    if D is not None:
        Rz = Rz * D[None, :]
    return float(np.linalg.norm(Rz @ Ry.T))
