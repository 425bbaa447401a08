"""Banded matrix storage, arithmetic and LU solves.

Every finite operator truncation in the package lives in a ``BandedMatrix``.
Storage is the LAPACK band layout: ``data[upper + i - j, j] = A[i, j]``, which
is also the layout ``scipy.sparse.dia_array`` and ``scipy.linalg.solve_banded``
use, so conversions are free.
"""
# Created: 2026-10-18

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import lapack

from .errors import DimensionError, SingularMatrixError

logger = logging.getLogger(__name__)


@dataclass
class BandedMatrix:
    """Real matrix stored by diagonals with (lower, upper) bandwidths."""
    nrows: int
    ncols: int
    lower: int
    upper: int
    data: np.ndarray  # shape (lower + upper + 1, ncols)

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != (self.lower + self.upper + 1, self.ncols):
            raise DimensionError(
                f"Band storage shape {self.data.shape} does not match "
                f"({self.lower + self.upper + 1}, {self.ncols})"
            )
        _zero_outside(self.data, self.nrows, self.upper)

    # ----- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, nrows: int, ncols: int, lower: int = 0, upper: int = 0) -> 'BandedMatrix':
        lower, upper = _clip_bandwidths(nrows, ncols, lower, upper)
        return cls(nrows, ncols, lower, upper, np.zeros((lower + upper + 1, ncols)))

    @classmethod
    def identity(cls, n: int) -> 'BandedMatrix':
        return cls(n, n, 0, 0, np.ones((1, n)))

    @classmethod
    def from_diagonals(
        cls, nrows: int, ncols: int, diagonals: Dict[int, np.ndarray]
    ) -> 'BandedMatrix':
        """Build from ``{offset: values}``; offset > 0 is above the diagonal.

        ``values[i]`` lands at row ``i`` (column ``i + offset``); values that
        fall outside the matrix are ignored.
        """
        offsets = [d for d in diagonals if -nrows < d < ncols]
        lower = max([0] + [-d for d in offsets])
        upper = max([0] + offsets)
        band = cls.zeros(nrows, ncols, lower, upper)
        for d in offsets:
            values = np.asarray(diagonals[d], dtype=float)
            rows = np.arange(max(0, -d), min(nrows, ncols - d))
            rows = rows[rows < len(values)]
            band.data[band.upper - d, rows + d] = values[rows]
        return band

    @classmethod
    def from_dense(
        cls, A: np.ndarray, lower: Optional[int] = None, upper: Optional[int] = None
    ) -> 'BandedMatrix':
        """Pack a dense matrix; bandwidths default to the detected ones."""
        A = np.asarray(A, dtype=float)
        nrows, ncols = A.shape
        rows, cols = np.nonzero(A)
        if lower is None:
            lower = int(max(0, (rows - cols).max())) if rows.size else 0
        if upper is None:
            upper = int(max(0, (cols - rows).max())) if rows.size else 0
        return cls.from_sparse(sparse.coo_array(A), lower, upper)

    @classmethod
    def from_sparse(cls, S: sparse.sparray, lower: int, upper: int) -> 'BandedMatrix':
        """Pack any scipy sparse matrix; entries outside the band must be zero."""
        coo = sparse.coo_array(S)
        nrows, ncols = coo.shape
        lower, upper = _clip_bandwidths(nrows, ncols, lower, upper)
        band = cls.zeros(nrows, ncols, lower, upper)
        offsets = coo.col - coo.row
        outside = (offsets > upper) | (offsets < -lower)
        if np.any(coo.data[outside] != 0):
            raise DimensionError(
                f"Sparse input has entries outside band (lower={lower}, upper={upper})"
            )
        keep = ~outside
        # duplicates in COO are summed
        np.add.at(band.data, (upper - offsets[keep], coo.col[keep]), coo.data[keep])
        return band

    # ----- views ------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def entry(self, i: int, j: int) -> float:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"Entry ({i}, {j}) outside {self.shape}")
        if j - i > self.upper or i - j > self.lower:
            return 0.0
        return float(self.data[self.upper + i - j, j])

    def diagonal(self, offset: int = 0) -> np.ndarray:
        """Entries A[i, i + offset] for every valid row i."""
        if offset > self.upper or -offset > self.lower:
            length = max(0, min(self.nrows, self.ncols - offset) - max(0, -offset))
            return np.zeros(length)
        rows = np.arange(max(0, -offset), min(self.nrows, self.ncols - offset))
        return self.data[self.upper - offset, rows + offset].copy()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def to_sparse(self) -> sparse.dia_array:
        offsets = np.arange(self.upper, -self.lower - 1, -1)
        return sparse.dia_array((self.data, offsets), shape=self.shape)

    def to_csr(self) -> sparse.csr_array:
        return self.to_sparse().tocsr()

    # ----- simple transformations -------------------------------------------

    def transpose(self) -> 'BandedMatrix':
        return BandedMatrix.from_sparse(self.to_sparse().T, self.upper, self.lower)

    @property
    def T(self) -> 'BandedMatrix':
        return self.transpose()

    def scale_columns(self, weights: np.ndarray) -> 'BandedMatrix':
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.ncols,):
            raise DimensionError(f"Need {self.ncols} column weights, got {weights.shape}")
        return BandedMatrix(self.nrows, self.ncols, self.lower, self.upper,
                            self.data * weights[None, :])

    def truncate(self, nrows: int, ncols: Optional[int] = None) -> 'BandedMatrix':
        """Leading ``nrows x ncols`` block (P_n A P_m^T)."""
        ncols = nrows if ncols is None else ncols
        if nrows > self.nrows or ncols > self.ncols:
            raise DimensionError(f"Cannot truncate {self.shape} to ({nrows}, {ncols})")
        lower, upper = _clip_bandwidths(nrows, ncols, self.lower, self.upper)
        rows = slice(self.upper - upper, self.upper + lower + 1)
        return BandedMatrix(nrows, ncols, lower, upper, self.data[rows, :ncols].copy())

    def dot(self, X: np.ndarray) -> np.ndarray:
        """A @ X for a dense vector or matrix X."""
        if X.shape[0] != self.ncols:
            raise DimensionError(f"Cannot apply {self.shape} to {X.shape}")
        return self.to_csr() @ X

    def rdot(self, X: np.ndarray) -> np.ndarray:
        """X @ A for a dense matrix X."""
        if X.shape[-1] != self.nrows:
            raise DimensionError(f"Cannot apply {X.shape} to {self.shape}")
        return (self.to_csr().T @ X.T).T


@dataclass
class BandedLU:
    """LU factors of a square banded matrix with partial pivoting.

    ``factors`` is LAPACK gbtrf output: the upper factor has bandwidth
    ``lower + upper`` (fill-in) and the multipliers sit below it.
    """
    factors: np.ndarray
    pivots: np.ndarray
    size: int
    lower: int
    upper: int


def band_add_scaled(A: BandedMatrix, B: BandedMatrix, s: float) -> BandedMatrix:
    """Return A + s*B; bandwidths are the elementwise max."""
    if A.shape != B.shape:
        raise DimensionError(f"Cannot add {A.shape} and {B.shape}")
    lower = max(A.lower, B.lower)
    upper = max(A.upper, B.upper)
    out = BandedMatrix.zeros(A.nrows, A.ncols, lower, upper)
    out.data[upper - A.upper: upper + A.lower + 1] += A.data
    out.data[upper - B.upper: upper + B.lower + 1] += s * B.data
    return out


def band_matmul(A: BandedMatrix, B: BandedMatrix) -> BandedMatrix:
    """Exact banded product; bandwidths add (clipped to the result shape)."""
    if A.ncols != B.nrows:
        raise DimensionError(f"Cannot multiply {A.shape} by {B.shape}")
    product = A.to_csr() @ B.to_csr()
    return BandedMatrix.from_sparse(product, A.lower + B.lower, A.upper + B.upper)


def band_lu(A: BandedMatrix) -> BandedLU:
    """Factor PA = LU with partial pivoting (LAPACK gbtrf)."""
    if A.nrows != A.ncols:
        raise DimensionError(f"LU needs a square matrix, got {A.shape}")
    kl, ku = A.lower, A.upper
    # gbtrf wants kl extra rows on top for the fill-in
    ab = np.zeros((2 * kl + ku + 1, A.ncols), order='F')
    ab[kl:, :] = A.data
    gbtrf, = lapack.get_lapack_funcs(('gbtrf',), (ab,))
    factors, pivots, info = gbtrf(ab, kl, ku)
    if info > 0:
        raise SingularMatrixError(info - 1)
    if info < 0:
        raise ValueError(f"gbtrf rejected argument {-info}")
    return BandedLU(factors=factors, pivots=pivots, size=A.nrows, lower=kl, upper=ku)


def band_solve(F: BandedLU, RHS: np.ndarray, side: str = 'left') -> np.ndarray:
    """Solve M X = RHS (side='left') or X M = RHS (side='right').

    Right solves reuse the factorization of M through a transposed LAPACK solve,
    so one factorization per shift serves every column.
    """
    RHS = np.asarray(RHS, dtype=float)
    vector = RHS.ndim == 1
    if side == 'left':
        B, trans = (RHS[:, None] if vector else RHS), 0
    elif side == 'right':
        B, trans = (RHS[:, None] if vector else RHS.T), 1
    else:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    if B.shape[0] != F.size:
        raise DimensionError(f"RHS {RHS.shape} incompatible with size {F.size} ({side})")
    gbtrs, = lapack.get_lapack_funcs(('gbtrs',), (F.factors,))
    X, info = gbtrs(F.factors, F.lower, F.upper, np.asfortranarray(B), F.pivots, trans=trans)
    if info != 0:
        raise ValueError(f"gbtrs rejected argument {-info}")
    if vector:
        return X[:, 0]
    return X if side == 'left' else X.T


def _clip_bandwidths(nrows: int, ncols: int, lower: int, upper: int) -> Tuple[int, int]:
    return max(0, min(lower, nrows - 1)), max(0, min(upper, ncols - 1))


def _zero_outside(data: np.ndarray, nrows: int, upper: int) -> None:
    """Clear storage slots that map to rows outside the matrix."""
    nbands, ncols = data.shape
    if nbands == 0 or ncols == 0:
        return
    r = np.arange(nbands)[:, None]
    j = np.arange(ncols)[None, :]
    i = r - upper + j
    data[(i < 0) | (i >= nrows)] = 0.0
