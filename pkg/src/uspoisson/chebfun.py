"""Tensor-product Chebyshev coefficients: sampling, evaluation, resolution.

Coefficient matrices follow one convention everywhere: entry (i, j) multiplies
T_i(y) * T_j(x), so rows run over the y-degree and columns over the x-degree.
"""
# Created: 2026-10-18

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct

from .errors import DomainError

logger = logging.getLogger(__name__)

CHEBYSHEV = "chebyshev"

# Guard against 0/0 in relative tests on all-zero coefficients.
COEFF_FLOOR = 1e-300

# Points this far outside [-1, 1] still count as on the domain.
DOMAIN_SLACK = 1e-14


@dataclass
class Cheb2D:
    """Coefficient matrix of a function on [-1,1]^2.

    ``basis`` is ``"chebyshev"``, ``"recombined:<bc-id>"`` or
    ``"ultraspherical:<l>"``.
    """
    coeffs: np.ndarray
    basis: str = CHEBYSHEV

    def __post_init__(self) -> None:
        self.coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if self.coeffs.size == 0:
            raise ValueError("Cheb2D needs at least one coefficient")
        if not np.all(np.isfinite(self.coeffs)):
            raise DomainError("Cheb2D coefficients must be finite")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.coeffs.shape

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))


def cheb_points(n: int) -> np.ndarray:
    """Chebyshev points of the second kind, ordered from 1 down to -1."""
    if n < 1:
        raise ValueError(f"Need at least one point, got {n}")
    if n == 1:
        return np.zeros(1)
    return np.cos(np.pi * np.arange(n) / (n - 1))


def values_to_coeffs(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Chebyshev coefficients from samples at ``cheb_points`` (DCT-I)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    if n == 1:
        return values.copy()
    coeffs = dct(values, type=1, axis=axis) / (n - 1)
    ends = [slice(None)] * values.ndim
    for k in (0, n - 1):
        ends[axis] = k
        coeffs[tuple(ends)] /= 2
    return coeffs


def cheb_coeffs_1d(f: Callable, n: int) -> np.ndarray:
    """Interpolation coefficients of a univariate function at n points."""
    x = cheb_points(n)
    values = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DomainError(f"Non-finite sample at x={x[bad[0]]!r}")
    return values_to_coeffs(values)


def chop(coeffs: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    """Drop trailing coefficients below tol relative to the largest one."""
    coeffs = np.asarray(coeffs, dtype=float)
    scale = max(np.max(np.abs(coeffs)) if coeffs.size else 0.0, COEFF_FLOOR)
    significant = np.flatnonzero(np.abs(coeffs) > tol * scale)
    if significant.size == 0:
        return coeffs[:1].copy()
    return coeffs[: significant[-1] + 1].copy()


def cheb_transform_2d(f: Callable, n: int, m: int) -> Cheb2D:
    """Sample f(x, y) on the n x m point grid and return its coefficients.

    n counts y-points (rows), m counts x-points (columns). ``f`` is called
    once with meshgrid arrays and may return a scalar for constants.
    """
    if n < 1 or m < 1:
        raise ValueError(f"Grid sizes must be positive, got {n}x{m}")
    y = cheb_points(n)
    x = cheb_points(m)
    X, Y = np.meshgrid(x, y)
    values = np.broadcast_to(np.asarray(f(X, Y), dtype=float), X.shape)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        a, b = bad[0]
        raise DomainError(f"Non-finite sample at (x={x[b]!r}, y={y[a]!r})")
    coeffs = values_to_coeffs(values_to_coeffs(values, axis=0), axis=1)
    return Cheb2D(coeffs)


def clenshaw_eval(c: Cheb2D, pts: Iterable[Sequence[float]]) -> List[float]:
    """Evaluate the Chebyshev series at (x, y) points (nested Clenshaw)."""
    if c.basis != CHEBYSHEV:
        raise ValueError(f"Clenshaw evaluation needs Chebyshev coefficients, not {c.basis}")
    pts = np.asarray(list(pts), dtype=float).reshape(-1, 2)
    outside = np.flatnonzero(np.any(np.abs(pts) > 1 + DOMAIN_SLACK, axis=1))
    if outside.size:
        x, y = pts[outside[0]]
        raise DomainError(f"Point ({x}, {y}) lies outside [-1,1]^2")
    return C.chebval2d(pts[:, 1], pts[:, 0], c.coeffs).tolist()


def evaluate_grid(c: Cheb2D, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Values on the tensor grid; result[a, b] = u(x[b], y[a])."""
    if c.basis != CHEBYSHEV:
        raise ValueError(f"Grid evaluation needs Chebyshev coefficients, not {c.basis}")
    return C.chebgrid2d(np.asarray(y, dtype=float), np.asarray(x, dtype=float), c.coeffs)


def is_resolved(c: Cheb2D, tol: float) -> bool:
    """True when the trailing 2 rows and columns are below tol * max|c|."""
    n, m = c.shape
    if n < 8 or m < 8:
        raise ValueError(f"Resolution test needs at least 8x8 coefficients, got {n}x{m}")
    a = np.abs(c.coeffs)
    tail = max(a[-2:, :].max(), a[:, -2:].max())
    return bool(tail <= tol * max(a.max(), COEFF_FLOOR))


def pad_or_trim(c: Cheb2D, n2: int, m2: int) -> Cheb2D:
    """Zero-pad or truncate to n2 x m2, keeping the basis tag."""
    out = np.zeros((n2, m2))
    n = min(n2, c.shape[0])
    m = min(m2, c.shape[1])
    out[:n, :m] = c.coeffs[:n, :m]
    return Cheb2D(out, c.basis)
