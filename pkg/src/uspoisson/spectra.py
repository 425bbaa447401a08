"""Enclosing intervals for the spectra of the 1D discretized operators.

Intervals describe eigenvalues of the pencil (D T) v = lambda (S T) v, i.e.
of the differential operator itself, unless ``reciprocal`` is set, in which
case they describe the inverse operator A2^{-1} A1 that ADI works with.

Degree convention: ``dirichlet2_bounds(n)`` and ``clamped4_bounds(n)`` take
the polynomial degree n of the trial space. A square system of size m uses
degree m + 1 (second order) or m + 3 (fourth order); ``second_order_bounds``
and ``fourth_order_bounds`` do that bookkeeping.
"""
# Created: 2026-10-18

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, sqrt
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from .banded import BandedMatrix, band_lu, band_solve
from .errors import ConvergenceError, SpectrumError

logger = logging.getLogger(__name__)

DEFAULT_SAFETY = 1.1
DEFAULT_ITERS = 500
POWER_TOL = 1e-8


@dataclass(frozen=True)
class SpectralInterval:
    """Closed interval [lo, hi] holding a real spectrum."""
    lo: float
    hi: float
    reciprocal: bool = False

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise SpectrumError(f"Interval bounds out of order: [{self.lo}, {self.hi}]")

    @property
    def excludes_zero(self) -> bool:
        return self.lo * self.hi > 0

    def contains(self, value: float, rtol: float = 0.0) -> bool:
        slack = rtol * max(abs(self.lo), abs(self.hi))
        return self.lo - slack <= value <= self.hi + slack

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "reciprocal": self.reciprocal}


@dataclass
class CharCoeffs:
    """Coefficients of a characteristic polynomial, leading coefficient first.

    Stored as sign and log-magnitude so huge factorial ratios never overflow;
    ``values`` materializes them and raises if that is impossible.
    """
    log_values: np.ndarray
    signs: np.ndarray
    parity: str = "even"
    n: int = 0

    @classmethod
    def from_values(cls, values: Sequence[float], parity: str = "even", n: int = 0) -> 'CharCoeffs':
        v = np.asarray(values, dtype=float)
        with np.errstate(divide='ignore'):
            logs = np.log(np.abs(v))
        return cls(logs, np.sign(v), parity, n)

    @property
    def degree(self) -> int:
        return len(self.log_values) - 1

    @property
    def values(self) -> np.ndarray:
        with np.errstate(over='ignore'):
            v = self.signs * np.exp(self.log_values)
        if not np.all(np.isfinite(v)):
            raise SpectrumError(
                f"Characteristic coefficients overflow double precision (n={self.n})"
            )
        return v

    def ratio(self, i: int, j: int) -> float:
        """values[i] / values[j] without materializing either."""
        if self.signs[j] == 0:
            raise SpectrumError(f"Characteristic coefficient {j} vanishes")
        return float(self.signs[i] * self.signs[j] * np.exp(self.log_values[i] - self.log_values[j]))


def char_coeffs_dirichlet2(n: int) -> Tuple[CharCoeffs, CharCoeffs]:
    """Closed-form a_k (odd family) and b_k (even family) for degree n.

    a_k = 2^{2k} Gamma(n+2k+3) (2k+1)! / (Gamma(4k+4) (n-2k-1)!), k < n/2
    b_k = 2^{2k} Gamma(n+2k+4) (2k+1)! / (Gamma(4k+4) (n-2k)!),   k <= n/2
    """
    if n < 4 or n % 2:
        raise ValueError(f"Need an even degree n >= 4, got {n}")
    ka = np.arange(n // 2, dtype=float)
    kb = np.arange(n // 2 + 1, dtype=float)
    log_a = (2 * ka * np.log(2) + gammaln(n + 2 * ka + 3) + gammaln(2 * ka + 2)
             - gammaln(4 * ka + 4) - gammaln(n - 2 * ka))
    log_b = (2 * kb * np.log(2) + gammaln(n + 2 * kb + 4) + gammaln(2 * kb + 2)
             - gammaln(4 * kb + 4) - gammaln(n - 2 * kb + 1))
    a = CharCoeffs(log_a, np.ones_like(log_a), "odd", n)
    b = CharCoeffs(log_b, np.ones_like(log_b), "even", n)
    return a, b


def newton_bound(c: CharCoeffs) -> Tuple[float, float]:
    """Magnitude bounds (lower, upper) on the roots of a real-rooted polynomial.

    The upper bound is sqrt(c1^2 - 2 c2) on the monic polynomial; the lower one
    applies the same bound to the reversed polynomial in mu = 1/lambda.
    """
    if c.degree < 1:
        raise ValueError("A constant polynomial has no roots to bound")

    def sum_of_squares(first: int, step: int) -> float:
        c1 = c.ratio(first + step, first)
        c2 = c.ratio(first + 2 * step, first) if c.degree >= 2 else 0.0
        s = c1 * c1 - 2.0 * c2
        if s < 0:
            raise SpectrumError(
                f"c1^2 - 2 c2 = {s:.3e} < 0: the roots are not all real"
            )
        return s

    upper = sqrt(sum_of_squares(0, 1))
    reversed_sq = sum_of_squares(c.degree, -1)
    if reversed_sq == 0:
        raise SpectrumError("Reversed polynomial has no nonzero roots")
    return 1.0 / sqrt(reversed_sq), upper


def dirichlet2_bounds(n: float) -> SpectralInterval:
    """Closed-form enclosure for the Dirichlet second-order spectrum at degree n."""
    if n < 4:
        raise ValueError(f"Need degree n >= 4, got {n}")
    n = float(n)
    lo = -sqrt(n * (n - 1) * (n + 5) * (n + 4)
               * (29 * n**4 + 232 * n**3 + 2279 * n**2 + 7260 * n - 17640) / 121275)
    hi = -sqrt(48 * (n**3 + 2 * n**2 + n) / (8 * n**3 + 16 * n**2 + 8 * n - 3))
    return SpectralInterval(lo, hi)


def second_order_bounds(size: int) -> SpectralInterval:
    """Dirichlet bounds for a square system of the given size."""
    return dirichlet2_bounds(size + 1)


def clamped4_bounds(n: int) -> SpectralInterval:
    """Newton bounds for the clamped fourth-order spectrum at degree n.

    Built from exact integer characteristic coefficients using
    d^m/dx^m C^(l)_k = 2^m (l)_m C^(l+m)_{k-m} and C^(l)_k(1) = binom(k+2l-1, k);
    parity splits the boundary determinant into the families {n, n-2} and
    {n-1, n-3}. Only the two leading and two trailing coefficients are needed.
    """
    if n < 8:
        raise ValueError(f"Need degree n >= 8, got {n}")
    lowers, uppers = [], []
    for top in (n, n - 1):
        coeffs = _clamped_family_coeffs(top)
        lower, upper = newton_bound(coeffs)
        lowers.append(lower)
        uppers.append(upper)
    return SpectralInterval(min(lowers), max(uppers))


def fourth_order_bounds(size: int) -> SpectralInterval:
    """Clamped bounds for a square fourth-order system of the given size."""
    return clamped4_bounds(size + 3)


def reciprocal_interval(s: SpectralInterval) -> SpectralInterval:
    """[1/hi, 1/lo]: the spectrum of the inverse operator."""
    if not s.excludes_zero:
        raise SpectrumError(f"Interval [{s.lo}, {s.hi}] contains 0; no reciprocal")
    return SpectralInterval(1.0 / s.hi, 1.0 / s.lo, not s.reciprocal)


def shifted_interval(s: SpectralInterval, rho_range: Tuple[float, float]) -> SpectralInterval:
    """Enclosure for u'' - rho*u given an enclosure for u'' and rho's range."""
    rho_lo, rho_hi = rho_range
    if rho_lo > rho_hi:
        raise ValueError(f"rho range out of order: {rho_range}")
    if s.reciprocal:
        raise SpectrumError("Shift the operator interval, not its reciprocal")
    out = SpectralInterval(s.lo - rho_hi, s.hi - rho_lo)
    if not out.excludes_zero:
        raise SpectrumError(
            f"Operator with rho in [{rho_lo:g}, {rho_hi:g}] is indefinite: "
            f"spectrum may reach [{out.lo:g}, {out.hi:g}]"
        )
    return out


def dominant_eigenvalue(
    apply: Callable[[np.ndarray], np.ndarray], n: int,
    iters: int = DEFAULT_ITERS, tol: float = POWER_TOL,
) -> float:
    """Power iteration from the alternating-sign start vector."""
    v = (-1.0) ** np.arange(n)
    v /= np.linalg.norm(v)
    estimate: Optional[float] = None
    for it in range(1, iters + 1):
        w = apply(v)
        new = float(v @ w)
        norm = np.linalg.norm(w)
        if norm == 0 or not np.isfinite(norm):
            raise ConvergenceError(f"Power iteration broke down at step {it}")
        v = w / norm
        if estimate is not None and abs(new - estimate) <= tol * abs(new):
            logger.debug(f"Power iteration converged in {it} steps: {new:.6e}")
            return new
        estimate = new
    raise ConvergenceError(
        f"Power iteration did not converge in {iters} steps "
        f"(complex dominant pair suspected); try more iterations"
    )


def empirical_interval(
    A1: BandedMatrix, A2: BandedMatrix,
    iters: int = DEFAULT_ITERS, safety: float = DEFAULT_SAFETY,
) -> SpectralInterval:
    """Extreme eigenvalues of A2^{-1} A1 by (inverse) power iteration.

    The result describes the inverse operator (``reciprocal`` set) and is
    inflated by ``safety`` at both ends.
    """
    lu2 = band_lu(A2)
    lu1 = band_lu(A1)
    n = A1.nrows
    largest = dominant_eigenvalue(lambda v: band_solve(lu2, A1.dot(v)), n, iters)
    inverse = dominant_eigenvalue(lambda v: band_solve(lu1, A2.dot(v)), n, iters)
    smallest = 1.0 / inverse
    if largest * smallest <= 0:
        raise SpectrumError(
            f"Extreme eigenvalues {smallest:.3e} and {largest:.3e} straddle 0"
        )
    if largest > 0:
        return SpectralInterval(smallest / safety, largest * safety, reciprocal=True)
    return SpectralInterval(largest * safety, smallest / safety, reciprocal=True)


# ----- fourth-order characteristic coefficients --------------------------------

def _rising(a: int, m: int) -> int:
    return factorial(a + m - 1) // factorial(a - 1)


def _value_at_one(m: int, k: int) -> int:
    """L^k C^(4)_m evaluated at x = 1, with L = d^4/dx^4."""
    j = m - 4 * k
    if j < 0:
        return 0
    return 2 ** (4 * k) * _rising(4, 4 * k) * comb(m + 4 * k + 7, j)


def _slope_at_one(m: int, k: int) -> int:
    """(L^k C^(4)_m)'(1)."""
    j = m - 4 * k - 1
    if j < 0:
        return 0
    return 2 ** (4 * k + 1) * _rising(4, 4 * k + 1) * comb(m + 4 * k + 8, j)


def _clamped_family_coeffs(top: int) -> CharCoeffs:
    """Characteristic coefficients of the family {top, top - 2}.

    det(mu) = G_top(1) G'_{top-2}(1) - G_{top-2}(1) G'_top(1) with
    G = sum_k mu^k L^k; the coefficient of mu^s multiplies lambda^{D-s}.
    """
    low = top - 2

    def coefficient(s: int) -> int:
        total = 0
        for i in range(s + 1):
            j = s - i
            total += (_value_at_one(top, i) * _slope_at_one(low, j)
                      - _value_at_one(low, i) * _slope_at_one(top, j))
        return total

    degree = top // 4 + low // 4 + 1
    while degree > 0 and coefficient(degree) == 0:
        degree -= 1
    if degree < 1:
        raise SpectrumError(f"Clamped family {top} has no roots")
    head = [coefficient(s) for s in range(min(3, degree + 1))]
    tail = [coefficient(s) for s in range(max(degree - 2, 0), degree + 1)]
    # only the first and last three entries matter to newton_bound
    values: List[int] = head + [0] * max(0, degree + 1 - len(head) - len(tail)) + tail
    if degree + 1 < len(head) + len(tail):
        values = [coefficient(s) for s in range(degree + 1)]
    logs = np.array([_log_abs(v) for v in values])
    signs = np.array([float((v > 0) - (v < 0)) for v in values])
    return CharCoeffs(logs, signs, "even" if top % 2 == 0 else "odd", top)


def _log_abs(value: int) -> float:
    if value == 0:
        return float("-inf")
    value = abs(value)
    shift = max(value.bit_length() - 1000, 0)
    return float(np.log(float(Fraction(value, 1 << shift)))) + shift * float(np.log(2))
