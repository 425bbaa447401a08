"""Boundary functionals and basis-recombination transforms.

A transform T is lower triangular with lower bandwidth N (the number of
constraints): column k combines T_k, ..., T_{k+N} so that every boundary
functional annihilates it. The unknown then lives in the recombined basis and
the boundary conditions never appear as extra rows.
"""
# Created: 2026-10-18

import logging
from dataclasses import dataclass
from enum import Enum
from math import factorial, isfinite
from typing import Callable, Optional, Sequence

import numpy as np

from .banded import BandedMatrix
from .errors import DegenerateConstraintsError

logger = logging.getLogger(__name__)

UNIT_LEADING = "unit-leading"
DIAGONAL_UNITY = "diagonal-unity"
SCALINGS = (UNIT_LEADING, DIAGONAL_UNITY)

# Sides at the -1 end of their coordinate.
LOWER_SIDES = frozenset({"left", "bottom"})
SIDES = ("left", "right", "bottom", "top")


class BCKind(str, Enum):
    """Boundary functional kinds."""
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"


class TransformKind(str, Enum):
    """Transforms with printed closed forms."""
    TD = "TD"  # Dirichlet both ends
    TN = "TN"  # Dirichlet left, Neumann right
    TR = "TR"  # Dirichlet left, Robin right
    TF = "TF"  # clamped, fourth order


@dataclass(frozen=True)
class BoundarySpec:
    """One boundary functional on one side plus its data.

    Neumann means the plain derivative in the normal coordinate. Robin is
    u + theta*u' on the upper end and u - theta*u' on the lower end, so theta
    plays the same role on both sides. ``data`` is a callable f(x, y); None
    means homogeneous.
    """
    side: str
    kind: BCKind
    theta: float = 0.0
    data: Optional[Callable] = None

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"Unknown side {self.side!r}; expected one of {SIDES}")
        object.__setattr__(self, "kind", BCKind(self.kind))
        if self.kind is BCKind.ROBIN and (not isfinite(self.theta) or self.theta == 0):
            raise ValueError("Robin theta must be finite and nonzero")

    @property
    def at_lower_end(self) -> bool:
        return self.side in LOWER_SIDES

    @property
    def label(self) -> str:
        if self.kind is BCKind.ROBIN:
            return f"robin({self.theta:g})-{self.side}"
        return f"{self.kind.value}-{self.side}"

    @property
    def homogeneous(self) -> bool:
        return self.data is None


@dataclass
class TransformOp:
    """Recombination transform with its constraint descriptor and scaling rule."""
    matrix: BandedMatrix
    bc_id: str
    scaling: str

    @property
    def n(self) -> int:
        return self.matrix.ncols

    @property
    def band(self) -> int:
        return self.matrix.lower


def boundary_rows(b: BoundarySpec, n: int) -> np.ndarray:
    """The functional applied to T_0, ..., T_{n-1}."""
    i = np.arange(n, dtype=float)
    sign = (-1.0) ** np.arange(n) if b.at_lower_end else np.ones(n)
    if b.kind is BCKind.DIRICHLET:
        return sign
    if b.kind is BCKind.NEUMANN:
        return -sign * i**2 if b.at_lower_end else i**2
    return sign * (1.0 + b.theta * i**2)


def boundary_row(b: BoundarySpec, i: int) -> float:
    """The functional applied to T_i."""
    if i < 0:
        raise ValueError(f"Index must be >= 0, got {i}")
    return float(boundary_rows(b, i + 1)[i])


def bc_descriptor(constraints: Sequence[BoundarySpec]) -> str:
    return "+".join(b.label for b in constraints)


def diagonal_unity_scale(order: int, n: int) -> np.ndarray:
    """1 / D_order(k, k + order) for k < n: the entry making diag(D T) = 1."""
    return 1.0 / (2 ** (order - 1) * factorial(order - 1) * (order + np.arange(n, dtype=float)))


def build_transform(
    constraints: Sequence[BoundarySpec], n: int, scaling: str = DIAGONAL_UNITY
) -> TransformOp:
    """Solve each column's N x (N+1) nullspace problem.

    Column k lives on rows k..k+N; one entry is fixed by ``scaling`` (v_k = 1
    for unit-leading, v_{k+N} from the D_N diagonal for diagonal-unity) and
    the rest follow. Rows past n are cut (square truncation).
    """
    if scaling not in SCALINGS:
        raise ValueError(f"Unknown scaling {scaling!r}; expected one of {SCALINGS}")
    N = len(constraints)
    if N < 1 or n <= N:
        raise ValueError(f"Need 1 <= N < n, got N={N}, n={n}")
    rows = np.stack([boundary_rows(b, n + N) for b in constraints])  # (N, n + N)
    # block[k] is the N x (N+1) system on indices k..k+N
    idx = np.arange(n)[:, None] + np.arange(N + 1)[None, :]
    block = np.transpose(rows[:, idx], (1, 0, 2))  # (n, N, N+1)

    ranks = np.linalg.matrix_rank(block)
    if np.any(ranks < N):
        raise DegenerateConstraintsError(int(np.flatnonzero(ranks < N)[0]))

    columns = np.empty((n, N + 1))
    if scaling == UNIT_LEADING:
        fixed = np.ones(n)
        free, pinned = block[:, :, 1:], block[:, :, 0]
    else:
        fixed = diagonal_unity_scale(N, n)
        free, pinned = block[:, :, :N], block[:, :, N]
    reduced_ranks = np.linalg.matrix_rank(free)
    if np.any(reduced_ranks < N):
        k = int(np.flatnonzero(reduced_ranks < N)[0])
        raise DegenerateConstraintsError(
            k, f"Scaling {scaling!r} pins a component that must vanish at column {k}"
        )
    rest = np.linalg.solve(free, -(pinned * fixed[:, None])[:, :, None])[:, :, 0]
    if scaling == UNIT_LEADING:
        columns[:, 0], columns[:, 1:] = fixed, rest
    else:
        columns[:, :N], columns[:, N] = rest, fixed

    return TransformOp(_from_columns(columns, n), bc_descriptor(constraints), scaling)


def closed_form_transform(kind: TransformKind, n: int, theta: Optional[float] = None) -> TransformOp:
    """Emit the printed closed forms for T_D, T_N, T_R(theta) and T_F.

    T_D and T_F come with unit leading entries, T_N and T_R with r_k = 1/(2k+4),
    which is the diagonal-unity choice for D_2.
    """
    kind = TransformKind(kind)
    columns = _closed_form_columns(kind, n, theta)
    return TransformOp(_from_columns(columns, n), _CLOSED_FORM_IDS[kind](theta),
                       _CLOSED_FORM_SCALING[kind])


def transform_for(
    constraints: Sequence[BoundarySpec], n: int, scaling: str = DIAGONAL_UNITY
) -> TransformOp:
    """Closed form when the constraint set has one, generic nullspace otherwise."""
    if scaling not in SCALINGS:
        raise ValueError(f"Unknown scaling {scaling!r}; expected one of {SCALINGS}")
    kinds = [(b.kind, b.at_lower_end) for b in constraints]
    theta = None
    if kinds == [(BCKind.DIRICHLET, True), (BCKind.DIRICHLET, False)]:
        kind = TransformKind.TD
    elif kinds == [(BCKind.DIRICHLET, True), (BCKind.NEUMANN, False)]:
        kind = TransformKind.TN
    elif kinds == [(BCKind.DIRICHLET, True), (BCKind.ROBIN, False)]:
        kind, theta = TransformKind.TR, constraints[1].theta
    elif kinds == [(BCKind.DIRICHLET, True), (BCKind.NEUMANN, True),
                   (BCKind.DIRICHLET, False), (BCKind.NEUMANN, False)]:
        kind = TransformKind.TF
    else:
        return build_transform(constraints, n, scaling)
    columns = _closed_form_columns(kind, n, theta)
    if scaling != _CLOSED_FORM_SCALING[kind]:
        columns = _rescale_columns(columns, scaling)
    return TransformOp(_from_columns(columns, n), bc_descriptor(constraints), scaling)


def _closed_form_columns(kind: TransformKind, n: int, theta: Optional[float]) -> np.ndarray:
    k = np.arange(n, dtype=float)
    if kind is TransformKind.TD:
        return np.stack([np.ones(n), np.zeros(n), -np.ones(n)], axis=1)
    if kind is TransformKind.TN:
        q = 2 * k**2 + 2 * k + 1
        t = -(2 * k**2 + 6 * k + 5) / (2 * (k + 2) * q)
        s = -2 * (k + 1) / ((k + 2) * q)
        return np.stack([t, s, 1 / (2 * k + 4)], axis=1)
    if kind is TransformKind.TR:
        if theta is None:
            raise ValueError("T_R needs theta")
        q = 2 * theta * k**2 + 2 * theta * k + theta + 2
        if np.any(q == 0):
            raise DegenerateConstraintsError(
                int(np.flatnonzero(q == 0)[0]),
                f"theta={theta} makes the T_R denominator vanish",
            )
        t = -(2 * theta * k**2 + 6 * theta * k + 5 * theta + 2) / (2 * (k + 2) * q)
        s = -2 * (theta + theta * k) / ((k + 2) * q)
        return np.stack([t, s, 1 / (2 * k + 4)], axis=1)
    zeros = np.zeros(n)
    return np.stack(
        [np.ones(n), zeros, -2 * (k + 2) / (k + 3), zeros, (k + 1) / (k + 3)], axis=1
    )


def _rescale_columns(columns: np.ndarray, scaling: str) -> np.ndarray:
    N = columns.shape[1] - 1
    if scaling == UNIT_LEADING:
        return columns / columns[:, :1]
    return columns * (diagonal_unity_scale(N, len(columns)) / columns[:, N])[:, None]


def _from_columns(columns: np.ndarray, n: int) -> BandedMatrix:
    """Band matrix whose column k holds columns[k, t] at row k + t."""
    N = columns.shape[1] - 1
    diagonals = {-t: np.concatenate([np.zeros(t), columns[:, t]]) for t in range(N + 1)}
    return BandedMatrix.from_diagonals(n, n, diagonals)


_CLOSED_FORM_SCALING = {
    TransformKind.TD: UNIT_LEADING,
    TransformKind.TN: DIAGONAL_UNITY,
    TransformKind.TR: DIAGONAL_UNITY,
    TransformKind.TF: UNIT_LEADING,
}

_CLOSED_FORM_IDS = {
    TransformKind.TD: lambda theta: "dirichlet-left+dirichlet-right",
    TransformKind.TN: lambda theta: "dirichlet-left+neumann-right",
    TransformKind.TR: lambda theta: f"dirichlet-left+robin({theta:g})-right",
    TransformKind.TF: lambda theta: "dirichlet-left+neumann-left+dirichlet-right+neumann-right",
}
