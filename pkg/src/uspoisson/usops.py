"""Ultraspherical differentiation, conversion and multiplication operators.

All operators are generated straight into band storage from their closed
forms; nothing here builds a dense matrix.
"""
# Created: 2026-10-18

import logging
from functools import reduce
from math import factorial

import numpy as np

from .banded import BandedMatrix, band_matmul
from .chebfun import chop
from .errors import DimensionError

logger = logging.getLogger(__name__)


def diff_op(order: int, n: int) -> BandedMatrix:
    """D_l: Chebyshev T coefficients to C^(l) coefficients of the l-th derivative.

    The only nonzero diagonal is the l-th superdiagonal, with entries
    2^(l-1) (l-1)! (l+i).
    """
    if order < 1:
        raise ValueError(f"Differentiation order must be >= 1, got {order}; use the identity")
    scale = 2 ** (order - 1) * factorial(order - 1)
    values = scale * (order + np.arange(max(n - order, 0), dtype=float))
    return BandedMatrix.from_diagonals(n, n, {order: values})


def conv_op(order: int, n: int) -> BandedMatrix:
    """S_l: C^(l) coefficients to C^(l+1) coefficients (S_0 starts from T)."""
    if order < 0:
        raise ValueError(f"Conversion order must be >= 0, got {order}")
    i = np.arange(n, dtype=float)
    if order == 0:
        diag = np.full(n, 0.5)
        diag[0] = 1.0
        super2 = np.full(max(n - 2, 0), -0.5)
    else:
        diag = order / (order + i)
        super2 = -order / (order + 2 + i[: max(n - 2, 0)])
    return BandedMatrix.from_diagonals(n, n, {0: diag, 2: super2})


def conv_chain(order: int, n: int) -> BandedMatrix:
    """S_{l-1} ... S_1 S_0 truncated to n x n (upper bandwidth 2l).

    Every factor is upper triangular, so the product of truncations equals
    the truncation of the product.
    """
    if order < 1:
        raise ValueError(f"Conversion chain order must be >= 1, got {order}")
    factors = [conv_op(k, n) for k in reversed(range(order))]
    return reduce(band_matmul, factors)


def mult_op(rho: np.ndarray, n: int, tol: float = 1e-15) -> BandedMatrix:
    """M_0[rho]: multiplication by sum_k rho_k T_k acting on T coefficients.

    Half of a Toeplitz part plus a Hankel part; bandwidth m - 1 where m is
    the length of rho after chopping its tail at ``tol`` relative.
    """
    a = chop(np.atleast_1d(np.asarray(rho, dtype=float)), tol)
    m = len(a)
    if m > n:
        raise DimensionError(f"Multiplier has {m} significant coefficients, operator size {n}")
    diagonals = {}
    rows = np.arange(n)
    for d in range(-(m - 1), m):
        toeplitz = np.full(n, a[abs(d)] * (2.0 if d == 0 else 1.0))
        hankel = np.zeros(n)
        k = 2 * rows + d  # a_{i + j} with j = i + d
        valid = (rows >= 1) & (k < m) & (rows + d >= 0)
        hankel[valid] = a[k[valid]]
        diagonals[d] = 0.5 * (toeplitz + hankel)
    return BandedMatrix.from_diagonals(n, n, diagonals)
