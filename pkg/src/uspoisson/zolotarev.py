"""Optimal ADI shifts from Zolotarev's rational approximation problem.

For spectra in [a, b] (left operator) and [c, d] (minus the right operator),
the shift pairs minimize max|s(x)| on [a, b] over min|s(x)| on [c, d] where
s(x) = prod_j (x - q_j) / (x - p_j). The q_j lie in [a, b], the p_j in [c, d].
"""
# Created: 2026-10-18

import logging
from dataclasses import dataclass, field
from math import ceil, cosh, log, pi, sinh, sqrt, tanh
from typing import List, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import ellipj, ellipk, ellipkm1

from .errors import SpectrumError
from .spectra import SpectralInterval

logger = logging.getLogger(__name__)

ASCENDING = "ascending"
DESCENDING = "descending"
ORDERS = (ASCENDING, DESCENDING)

MAX_SHIFTS = 300

# Below this complementary parameter dn comes from its series about m = 1.
SERIES_CUTOFF = 1e-9

MOBIUS_CHECK_TOL = 1e-10


@dataclass
class ShiftSchedule:
    """k shift pairs plus the parameters they came from."""
    p: List[float]
    q: List[float]
    intervals: Tuple[Tuple[float, float], Tuple[float, float]]
    gamma: float
    alpha: float
    beta: float
    order: str = ASCENDING

    def __post_init__(self) -> None:
        if len(self.p) != len(self.q):
            raise ValueError(f"Shift lists differ in length: {len(self.p)} vs {len(self.q)}")
        if self.order not in ORDERS:
            raise ValueError(f"Unknown shift order {self.order!r}; expected one of {ORDERS}")

    def __len__(self) -> int:
        return len(self.p)

    @property
    def k(self) -> int:
        return len(self.p)

    @property
    def bound(self) -> float:
        return zolotarev_bound(self.gamma, self.k)

    def rational(self, x: ArrayLike) -> np.ndarray:
        """s(x) = prod_j (x - q_j) / (x - p_j) evaluated elementwise."""
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        for p, q in zip(self.p, self.q):
            out = out * (x - q) / (x - p)
        return out

    def reversed(self) -> 'ShiftSchedule':
        other = DESCENDING if self.order == ASCENDING else ASCENDING
        return ShiftSchedule(self.p[::-1], self.q[::-1], self.intervals,
                             self.gamma, self.alpha, self.beta, other)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "order": self.order,
            "gamma": self.gamma,
            "alpha": self.alpha,
            "beta": self.beta,
            "intervals": [list(self.intervals[0]), list(self.intervals[1])],
            "bound": self.bound,
            "p": list(self.p),
            "q": list(self.q),
        }


@dataclass(frozen=True)
class MobiusMap:
    """M(z) = (m11 z + m12) / (m21 z + m22) sending -alpha, -1, 1, alpha to a, b, c, d.

    Evaluation goes through the cross-ratio form, which stays accurate when
    alpha is huge and the coefficients are badly scaled.
    """
    alpha: float
    a: float
    b: float
    c: float
    d: float
    coefficients: Tuple[float, float, float, float] = field(default=(0.0, 0.0, 0.0, 1.0))

    def __call__(self, z: float) -> float:
        if z == -self.alpha:
            return self.a
        s = ((z - 1.0) * (self.alpha - 1.0)) / (-2.0 * (z + self.alpha))
        return self.c + (self.c - self.a) * (self.b - self.c) * s / (
            (self.b - self.a) - (self.b - self.c) * s
        )


def cross_ratio_gamma(a: float, b: float, c: float, d: float) -> float:
    """gamma = |c-a||d-b| / (|c-b||d-a|) for disjoint [a, b] and [c, d]."""
    _check_intervals(a, b, c, d)
    gamma = abs(c - a) * abs(d - b) / (abs(c - b) * abs(d - a))
    if not gamma > 1:
        raise SpectrumError(f"Cross-ratio {gamma} <= 1 for [{a}, {b}] and [{c}, {d}]")
    return gamma


def elliptic_params(gamma: float) -> Tuple[float, float]:
    """(alpha, beta) with alpha = -1 + 2 gamma + 2 sqrt(gamma^2 - gamma)."""
    if not gamma > 1:
        raise ValueError(f"Need gamma > 1, got {gamma}")
    alpha = -1.0 + 2.0 * gamma + 2.0 * sqrt(gamma * gamma - gamma)
    beta = sqrt(1.0 - 1.0 / (alpha * alpha))
    return alpha, beta


def ellip_k(beta: float, m1: float = None) -> float:
    """Complete elliptic integral of the first kind for modulus beta.

    ``m1 = 1 - beta^2`` may be passed directly when beta is too close to 1
    to carry it.
    """
    if m1 is None:
        if not 0 <= beta < 1:
            raise ValueError(f"Modulus must lie in [0, 1), got {beta}")
        m1 = 1.0 - beta * beta
    if not 0 < m1 <= 1:
        raise ValueError(f"Complementary parameter must lie in (0, 1], got {m1}")
    if m1 > 0.5:
        return float(ellipk(1.0 - m1))
    return float(ellipkm1(m1))


def jacobi_dn(u: float, beta: float, m1: float = None) -> float:
    """Jacobi dn(u) for modulus beta (parameter beta^2)."""
    if m1 is None:
        if not 0 <= beta < 1:
            raise ValueError(f"Modulus must lie in [0, 1), got {beta}")
        m1 = 1.0 - beta * beta
    if not 0 < m1 <= 1:
        raise ValueError(f"Complementary parameter must lie in (0, 1], got {m1}")
    if m1 < SERIES_CUTOFF:
        sech = 1.0 / cosh(u)
        return sech + 0.25 * m1 * (sinh(u) * cosh(u) + u) * tanh(u) * sech
    _, _, dn, _ = ellipj(u, 1.0 - m1)
    return float(dn)


def mobius_map(alpha: float, a: float, b: float, c: float, d: float) -> MobiusMap:
    """The map sending {-alpha, -1, 1, alpha} to {a, b, c, d}.

    Three points fix it; the fourth is checked and must land on d.
    """
    _check_intervals(a, b, c, d)
    if not alpha > 1:
        raise ValueError(f"Need alpha > 1, got {alpha}")
    P, Q, R = b - a, b - c, (c - a) * (b - c)
    m21 = -2.0 * P - Q * (alpha - 1.0)
    m22 = -2.0 * P * alpha + Q * (alpha - 1.0)
    m11 = c * m21 + R * (alpha - 1.0)
    m12 = c * m22 - R * (alpha - 1.0)
    M = MobiusMap(alpha, a, b, c, d, (m11, m12, m21, m22))
    scale = max(abs(a), abs(b), abs(c), abs(d))
    miss = abs(M(alpha) - d)
    if miss > MOBIUS_CHECK_TOL * scale:
        raise SpectrumError(
            f"Inconsistent parameters: M(alpha) = {M(alpha)!r} misses d = {d!r}"
        )
    return M


def shift_count(gamma: float, eps: float) -> int:
    """k = ceil(log(16 gamma) log(4 / eps) / pi^2), clamped to [1, 300]."""
    if not gamma > 1:
        raise ValueError(f"Need gamma > 1, got {gamma}")
    if not 0 < eps <= 4:
        raise ValueError(f"Need 0 < eps <= 4, got {eps}")
    k = ceil(log(16.0 * gamma) * log(4.0 / eps) / pi**2)
    if k > MAX_SHIFTS:
        logger.warning(f"Shift count {k} capped at {MAX_SHIFTS}")
        return MAX_SHIFTS
    return max(k, 1)


def shifts(a: float, b: float, c: float, d: float, k: int, order: str = ASCENDING) -> ShiftSchedule:
    """Zolotarev shifts p_j = M(alpha dn(u_j)), q_j = M(-alpha dn(u_j)).

    u_j = (2j - 1) K / (2k). Ascending keeps j = 1..k; descending reverses
    both lists together.
    """
    if k < 1:
        raise ValueError(f"Need at least one shift, got {k}")
    if order not in ORDERS:
        raise ValueError(f"Unknown shift order {order!r}; expected one of {ORDERS}")
    gamma = cross_ratio_gamma(a, b, c, d)
    alpha, beta = elliptic_params(gamma)
    m1 = 1.0 / (alpha * alpha)
    K = ellip_k(beta, m1)
    M = mobius_map(alpha, a, b, c, d)
    p, q = [], []
    for j in range(1, k + 1):
        w = alpha * jacobi_dn((2 * j - 1) * K / (2 * k), beta, m1)
        p.append(M(w))
        q.append(M(-w))
    schedule = ShiftSchedule(p, q, ((a, b), (c, d)), gamma, alpha, beta, ASCENDING)
    logger.debug(f"Generated {k} shifts: gamma={gamma:.6e}, alpha={alpha:.6e}")
    return schedule.reversed() if order == DESCENDING else schedule


def zolotarev_bound(gamma: float, k: int) -> float:
    """4 exp(-k pi^2 / log(16 gamma)), an upper bound on the Zolotarev number."""
    if not gamma > 1:
        raise ValueError(f"Need gamma > 1, got {gamma}")
    return 4.0 * np.exp(-k * pi**2 / log(16.0 * gamma))


def schedule_for(
    left: SpectralInterval, right: SpectralInterval, eps: float, order: str = ASCENDING,
) -> ShiftSchedule:
    """Shifts for A X B2 + A2 X B1 given the spectra of A2^{-1} A1 and B1 B2^{-1}.

    The right interval enters negated, as [c, d] = [-right.hi, -right.lo].
    """
    for s in (left, right):
        if not s.reciprocal:
            raise SpectrumError("ADI shifts need intervals for the inverse operators")
    a, b = left.lo, left.hi
    c, d = -right.hi, -right.lo
    gamma = cross_ratio_gamma(a, b, c, d)
    k = shift_count(gamma, eps)
    return shifts(a, b, c, d, k, order)


def _check_intervals(a: float, b: float, c: float, d: float) -> None:
    if not (a < b and c < d):
        raise SpectrumError(f"Degenerate interval in [{a}, {b}], [{c}, {d}]")
    if not (b < c or d < a):
        raise SpectrumError(f"Intervals [{a}, {b}] and [{c}, {d}] overlap or touch")
