"""Low-rank factorizations of coefficient matrices for factored ADI."""
# Created: 2026-10-18

import logging
from typing import List, Optional, Tuple

import numpy as np

from .adi import LowRankRHS

logger = logging.getLogger(__name__)

ACA_TOLERANCE = 1e-15
PROBE_ROWS = 16


def aca(
    M: np.ndarray, tol: float = ACA_TOLERANCE, max_rank: Optional[int] = None
) -> LowRankRHS:
    """Adaptive cross approximation with partial pivoting.

    Each step reads one residual row and one residual column, so r crosses
    cost O((m + n) r^2). The next row is the largest entry of the last
    column. A cross is kept while its pivot exceeds ``tol`` times the
    Frobenius norm of the approximation so far. When a row offers nothing,
    evenly spaced unvisited rows are tried before stopping; with no cross
    yet every row is tried. A zero matrix gives rank 1 with zero factors.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"aca needs a matrix, got shape {M.shape}")
    m, n = M.shape
    max_rank = min(m, n) if max_rank is None else max_rank
    us: List[np.ndarray] = []
    vs: List[np.ndarray] = []
    visited = np.zeros(m, dtype=bool)
    norm2 = 0.0
    i: Optional[int] = 0 if m and n else None
    while i is not None and len(us) < max_rank:
        visited[i] = True
        row = _residual(M[i, :], vs, [u[i] for u in us])
        j = int(np.argmax(np.abs(row)))
        threshold = tol * np.sqrt(norm2)
        if row[j] != 0 and np.abs(row[j]) > threshold:
            v = row / row[j]
            u = _residual(M[:, j], us, [w[j] for w in vs])
            cross = sum((u @ a) * (v @ b) for a, b in zip(us, vs))
            norm2 = max(norm2 + (u @ u) * (v @ v) + 2 * cross, 0.0)
            us.append(u)
            vs.append(v)
            i = _next_row(u, visited)
        else:
            i = _probe_rows(M, us, vs, visited, threshold)
    logger.debug(f"ACA rank {len(us)} for {m}x{n}, {int(visited.sum())} rows read")
    if not us:
        return LowRankRHS(np.zeros((m, 1)), np.zeros((n, 1)))
    return LowRankRHS(np.column_stack(us), np.column_stack(vs))


def _residual(
    line: np.ndarray, factors: List[np.ndarray], weights: List[float]
) -> np.ndarray:
    out = line.copy()
    for f, w in zip(factors, weights):
        out -= w * f
    return out


def _next_row(u: np.ndarray, visited: np.ndarray) -> Optional[int]:
    if visited.all():
        return None
    return int(np.argmax(np.where(visited, -1.0, np.abs(u))))


def _probe_rows(M: np.ndarray, us: List[np.ndarray], vs: List[np.ndarray],
                visited: np.ndarray, threshold: float) -> Optional[int]:
    """First unvisited candidate row whose residual exceeds ``threshold``."""
    m = M.shape[0]
    if us:
        candidates = np.unique(np.linspace(0, m - 1, min(m, PROBE_ROWS)).astype(int))
    else:
        candidates = np.arange(m)
    for k in candidates:
        if visited[k]:
            continue
        row = _residual(M[k, :], vs, [u[k] for u in us])
        if np.max(np.abs(row)) > threshold and row.any():
            return int(k)
        visited[k] = True
    return None


def compress(U: np.ndarray, V: np.ndarray, tol: float = ACA_TOLERANCE) -> LowRankRHS:
    """Recompress U V^T by QR of both factors and an SVD of the small core."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    Qu, Ru = np.linalg.qr(U)
    Qv, Rv = np.linalg.qr(V)
    W, s, Zt = np.linalg.svd(Ru @ Rv.T)
    if s.size == 0 or s[0] == 0:
        return LowRankRHS(np.zeros((U.shape[0], 1)), np.zeros((V.shape[0], 1)))
    r = max(int(np.sum(s > tol * s[0])), 1)
    return LowRankRHS(Qu @ (W[:, :r] * s[:r]), Qv @ Zt[:r].T)


def stack(*parts: Tuple[np.ndarray, np.ndarray]) -> LowRankRHS:
    """Sum of factored terms given as (U, V) pairs."""
    return LowRankRHS(np.hstack([u for u, _ in parts]), np.hstack([v for _, v in parts]))
