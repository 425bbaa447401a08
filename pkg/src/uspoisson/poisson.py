"""Problem assembly, boundary lifting and the adaptive doubling driver.

Unknowns live in the recombined bases T_y (rows) and T_x (columns). The
equation L_x u + L_y u = f becomes

    A1 X B2 + A2 X B1 = F,   A1 = C T_y,  A2 = L_y T_y,
                             B1 = (C T_x)^T,  B2 = (L_x T_x)^T,

with C the conversion chain into the range space of L and F = C f C^T.
Operators are built at a padded size and truncated afterwards, so the
n x n blocks are exact sections of the infinite operators.
"""
# Created: 2026-10-18

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev as C

from .adi import (
    LowRankRHS, LowRankSolution, SolveReport, SylvesterSystem, adi_solve, fadi_solve, warm_restart,
)
from .banded import BandedMatrix, band_add_scaled, band_matmul
from .chebfun import (
    Cheb2D, cheb_coeffs_1d, cheb_points, cheb_transform_2d, chop, evaluate_grid, is_resolved, pad_or_trim,
)
from .errors import (
    ConfigError, CornerCompatibilityError, DegenerateConstraintsError, OracleSizeError, UnresolvedError,
)
from .lowrank import aca, compress, stack
from .oracle import kron_solve
from .recomb import (
    DIAGONAL_UNITY, BCKind, BoundarySpec, TransformOp, boundary_rows, transform_for,
)
from .spectra import (
    DEFAULT_ITERS, DEFAULT_SAFETY, SpectralInterval, empirical_interval, fourth_order_bounds,
    reciprocal_interval, second_order_bounds, shifted_interval,
)
from .usops import conv_chain, diff_op, mult_op
from .zolotarev import ASCENDING, DESCENDING, ShiftSchedule, schedule_for

logger = logging.getLogger(__name__)

POISSON = "poisson"
SEPARABLE = "separable"
BIHARMONIC = "biharmonic"
EQUATIONS = (POISSON, SEPARABLE, BIHARMONIC)

ADI = "adi"
FADI = "fadi"
ORACLE = "oracle"
SOLVERS = (ADI, FADI, ORACLE)

INITIAL_N = 16
ORACLE_MAX_N = 64
RHO_SAMPLES = 257
RHO_INFLATION = 0.05
CORNER_TOL = 1e-10
DATA_MAX_POINTS = 4097

_KIND_ORDER = {BCKind.DIRICHLET: 0, BCKind.NEUMANN: 1, BCKind.ROBIN: 2}


@dataclass
class ProblemSpec:
    """A PDE on [-1,1]^2 with its boundary conditions and solver choices.

    Functions (rhs, data, rho_x, rho_y, exact) are callables f(x, y); parsed
    expressions qualify. ``rhs`` may also be a ready ``Cheb2D``.
    """
    equation: str = POISSON
    rhs: Union[Callable, Cheb2D, None] = None
    bcs: List[BoundarySpec] = field(default_factory=list)
    rho_x: Optional[Callable] = None
    rho_y: Optional[Callable] = None
    tolerance: float = 1e-12
    max_n: int = 1024
    solver: str = ADI
    check_every: int = 10
    exact: Optional[Callable] = None
    initial_n: int = INITIAL_N
    empirical_safety: float = DEFAULT_SAFETY
    empirical_iters: int = DEFAULT_ITERS
    rho_samples: int = RHO_SAMPLES
    rho_inflation: float = RHO_INFLATION
    aca_tolerance: float = 1e-15

    def __post_init__(self) -> None:
        if self.equation not in EQUATIONS:
            raise ConfigError(f"Unknown equation kind {self.equation!r}", "equation.kind")
        if self.solver not in SOLVERS:
            raise ConfigError(f"Unknown solver {self.solver!r}; expected one of {SOLVERS}", "solver.method")
        if not 1e-15 < self.tolerance < 1:
            raise ConfigError(f"Tolerance {self.tolerance} must lie in (1e-15, 1)", "solver.tolerance")
        if self.max_n < 16 or self.max_n & (self.max_n - 1):
            raise ConfigError(f"max_n {self.max_n} must be a power of two >= 16", "solver.max_n")
        if not 8 <= self.initial_n <= self.max_n or self.initial_n & (self.initial_n - 1):
            raise ConfigError(
                f"initial_n {self.initial_n} must be a power of two in [8, max_n={self.max_n}]",
                "solver.initial_n",
            )
        if self.check_every < 1:
            raise ConfigError("check_every must be >= 1", "solver.check_every")
        if self.rhs is None:
            self.rhs = lambda x, y: 0.0
        if self.equation != SEPARABLE and (self.rho_x is not None or self.rho_y is not None):
            raise ConfigError(f"Coefficients rho_x/rho_y need equation kind {SEPARABLE!r}", "equation")
        if self.equation == SEPARABLE and self.rho_x is None and self.rho_y is None:
            raise ConfigError("Separable equation needs rho_x or rho_y", "equation")
        for name, banned in (("rho_x", "y"), ("rho_y", "x")):
            rho = getattr(self, name)
            if banned in getattr(rho, "variables", ()):
                raise ConfigError(f"{name} must not depend on {banned}", f"equation.{name}")
        self._check_bcs()

    def _check_bcs(self) -> None:
        per_side: Dict[str, List[BoundarySpec]] = {}
        for b in self.bcs:
            per_side.setdefault(b.side, []).append(b)
        missing = [s for s in ("left", "right", "bottom", "top") if s not in per_side]
        if missing:
            raise ConfigError(f"Missing boundary condition on {', '.join(missing)}", "bc")
        for side, specs in per_side.items():
            kinds = sorted(b.kind.value for b in specs)
            if self.order == 4:
                if kinds != ["dirichlet", "neumann"]:
                    raise ConfigError(
                        "Fourth-order problems take clamped (Dirichlet + Neumann) sides only",
                        f"bc.{side}",
                    )
            elif len(specs) != 1:
                raise ConfigError(f"Side {side} has {len(specs)} conditions, expected 1", f"bc.{side}")

    @property
    def order(self) -> int:
        return 4 if self.equation == BIHARMONIC else 2

    @property
    def pad(self) -> int:
        return 2 * self.order + 4

    def constraints(self, direction: str) -> List[BoundarySpec]:
        """Constraints for 'x' (left/right) or 'y' (bottom/top), lower end first."""
        sides = ("left", "right") if direction == "x" else ("bottom", "top")
        chosen = [b for b in self.bcs if b.side in sides]
        return sorted(chosen, key=lambda b: (not b.at_lower_end, _KIND_ORDER[b.kind]))

    def rho(self, direction: str) -> Optional[Callable]:
        return self.rho_x if direction == "x" else self.rho_y

    @property
    def homogeneous(self) -> bool:
        return all(b.homogeneous for b in self.bcs)


@dataclass
class DirectionOperators:
    """The 1D pieces for one coordinate at truncation n."""
    conv: BandedMatrix  # C T, n x n
    diff: BandedMatrix  # L T, n x n
    transform: TransformOp  # (n + N) x n
    constraints: List[BoundarySpec]
    rho_coeffs: Optional[np.ndarray] = None


@dataclass
class Lifting:
    """g = U V^T (rows y, columns x) and the right-hand side it leaves."""
    g: Cheb2D
    U: np.ndarray
    V: np.ndarray
    rhs: Union[np.ndarray, LowRankRHS]

    @property
    def rank(self) -> int:
        return self.U.shape[1]


@dataclass
class LevelReport:
    """One pass of the doubling driver."""
    n: int
    left: SpectralInterval
    right: SpectralInterval
    shifts: int
    order: str
    solve: SolveReport
    resolved: bool = False

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "left_interval": self.left.to_dict(),
            "right_interval": self.right.to_dict(),
            "shifts": self.shifts,
            "order": self.order,
            "iterations": self.solve.iterations_run,
            "resolved": self.resolved,
            "solve": self.solve.to_dict(),
        }


@dataclass
class AutoReport:
    """All levels of a solve_auto run."""
    levels: List[LevelReport] = field(default_factory=list)
    wall_time: float = 0.0
    lifting_rank: int = 0
    rhs_rank: Optional[int] = None
    checks: Dict[str, float] = field(default_factory=dict)

    @property
    def final(self) -> Optional[SolveReport]:
        return self.levels[-1].solve if self.levels else None

    @property
    def final_n(self) -> int:
        return self.levels[-1].n if self.levels else 0

    @property
    def iterations_run(self) -> int:
        return sum(level.solve.iterations_run for level in self.levels)

    def to_dict(self) -> dict:
        return {
            "final_n": self.final_n,
            "iterations_run": self.iterations_run,
            "wall_time": self.wall_time,
            "lifting_rank": self.lifting_rank,
            "rhs_rank": self.rhs_rank,
            "levels": [level.to_dict() for level in self.levels],
            "checks": dict(self.checks),
        }


# ----- 1D operators ------------------------------------------------------------

def rho_coefficients(rho: Callable, direction: str, samples: int = RHO_SAMPLES) -> np.ndarray:
    """Chopped Chebyshev coefficients of a coefficient function of one variable."""
    if direction == "x":
        coeffs = cheb_coeffs_1d(lambda t: rho(t, 0.0), samples)
    else:
        coeffs = cheb_coeffs_1d(lambda t: rho(0.0, t), samples)
    return chop(coeffs)


def rho_range(rho: Callable, direction: str, samples: int = RHO_SAMPLES,
              inflation: float = RHO_INFLATION) -> Tuple[float, float]:
    """Sampled range of rho, widened by ``inflation`` of each end's magnitude."""
    t = cheb_points(samples)
    values = np.broadcast_to(
        np.asarray(rho(t, 0.0) if direction == "x" else rho(0.0, t), dtype=float), t.shape
    )
    lo, hi = float(values.min()), float(values.max())
    return lo - inflation * abs(lo), hi + inflation * abs(hi)


def range_operators(order: int, size: int, rho_coeffs: Optional[np.ndarray] = None
                    ) -> Tuple[BandedMatrix, BandedMatrix]:
    """(C, L): the conversion chain and the differential operator at ``size``.

    L is D_order, or D_2 - S_1 S_0 M_0[rho] for a separable coefficient.
    """
    conv = conv_chain(order, size)
    diff = diff_op(order, size)
    if rho_coeffs is not None:
        diff = band_add_scaled(diff, band_matmul(conv, mult_op(rho_coeffs, size)), -1.0)
    return conv, diff


def direction_operators(spec: ProblemSpec, direction: str, n: int) -> DirectionOperators:
    """Assemble C T and L T for one direction, exact at truncation n."""
    constraints = spec.constraints(direction)
    rho = spec.rho(direction)
    rho_coeffs = rho_coefficients(rho, direction, spec.rho_samples) if rho is not None else None
    size = n + spec.pad + (len(rho_coeffs) if rho_coeffs is not None else 0)
    T = transform_for(constraints, size, DIAGONAL_UNITY)
    conv, diff = range_operators(spec.order, size, rho_coeffs)
    N = len(constraints)
    back = TransformOp(T.matrix.truncate(n + N, n), T.bc_id, T.scaling)
    return DirectionOperators(
        conv=band_matmul(conv, T.matrix).truncate(n),
        diff=band_matmul(diff, T.matrix).truncate(n),
        transform=back,
        constraints=constraints,
        rho_coeffs=rho_coeffs,
    )


def direction_interval(spec: ProblemSpec, direction: str, ops: DirectionOperators) -> SpectralInterval:
    """Enclosure for the spectrum of (L T)^{-1} (C T), as a reciprocal interval.

    Closed-form bounds cover Dirichlet second-order and clamped fourth-order
    directions; anything else is measured by power iteration.
    """
    n = ops.conv.nrows
    if spec.order == 4:
        return reciprocal_interval(fourth_order_bounds(n))
    if all(b.kind is BCKind.DIRICHLET for b in ops.constraints):
        operator = second_order_bounds(n)
        rho = spec.rho(direction)
        if rho is not None:
            operator = shifted_interval(
                operator, rho_range(rho, direction, spec.rho_samples, spec.rho_inflation)
            )
        return reciprocal_interval(operator)
    return empirical_interval(ops.conv, ops.diff, spec.empirical_iters, spec.empirical_safety)


# ----- right-hand side and lifting ---------------------------------------------

def rhs_coefficients(spec: ProblemSpec, size: int) -> np.ndarray:
    if isinstance(spec.rhs, Cheb2D):
        return pad_or_trim(spec.rhs, size, size).coeffs
    return cheb_transform_2d(spec.rhs, size, size).coeffs


def expand_data(f: Callable, start: int = 17, limit: int = DATA_MAX_POINTS) -> np.ndarray:
    """Chebyshev coefficients of univariate data, doubling until the tail is chopped."""
    m = start
    while True:
        coeffs = cheb_coeffs_1d(f, m)
        short = chop(coeffs)
        if len(short) < m - 2 or m >= limit:
            if len(short) >= m - 2:
                logger.warning(f"Boundary data not resolved at {m} points")
            return short
        m = 2 * (m - 1) + 1


def apply_functional(b: BoundarySpec, coeffs: np.ndarray) -> float:
    """The boundary functional of b applied to a 1D Chebyshev series."""
    return float(boundary_rows(b, len(coeffs)) @ coeffs)


def cardinal_functions(constraints: Sequence[BoundarySpec]) -> np.ndarray:
    """Columns phi_a with B_b phi_a = delta_ab from the lowest workable degree."""
    N = len(constraints)
    for extra in range(N + 3):
        B = np.stack([boundary_rows(b, N + extra) for b in constraints])
        if np.linalg.matrix_rank(B) == N:
            return np.linalg.lstsq(B, np.eye(N), rcond=None)[0]
    raise DegenerateConstraintsError(0, "Boundary functionals admit no interpolating polynomial")


def _side_data(b: BoundarySpec) -> np.ndarray:
    if b.data is None:
        return np.zeros(1)
    fixed = -1.0 if b.at_lower_end else 1.0
    if b.side in ("left", "right"):
        return expand_data(lambda t: b.data(np.full_like(t, fixed), t))
    return expand_data(lambda t: b.data(t, np.full_like(t, fixed)))


def lifting_factors(spec: ProblemSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Factors U (y side) and V (x side) of the boundary interpolant g = U V^T.

    g = sum_a h^x_a(y) phi_a(x) + sum_b psi_b(y) [h^y_b(x) - sum_a (B^y_b h^x_a) phi_a(x)]
    where h^x_a is the data of x-constraint a and B^y_b the y-functional b.
    """
    cx = spec.constraints("x")
    cy = spec.constraints("y")
    phi = cardinal_functions(cx)
    psi = cardinal_functions(cy)
    hx = [_side_data(b) for b in cx]
    hy = [_side_data(b) for b in cy]

    scale = max([1.0] + [float(np.max(np.abs(h))) for h in hx + hy])
    for a, bx in enumerate(cx):
        for b, by in enumerate(cy):
            along_x = apply_functional(bx, hy[b])
            along_y = apply_functional(by, hx[a])
            if abs(along_x - along_y) > CORNER_TOL * scale:
                raise CornerCompatibilityError(
                    f"Boundary data disagree at the {by.side}-{bx.side} corner: "
                    f"{bx.label} gives {along_x:.6e}, {by.label} gives {along_y:.6e}"
                )

    gy = max([psi.shape[0]] + [len(h) for h in hx])
    gx = max([phi.shape[0]] + [len(h) for h in hy])
    U_cols, V_cols = [], []
    for a in range(len(cx)):
        U_cols.append(_pad(hx[a], gy))
        V_cols.append(_pad(phi[:, a], gx))
    for b, by in enumerate(cy):
        w = _pad(hy[b], gx)
        for a in range(len(cx)):
            w = w - apply_functional(by, hx[a]) * _pad(phi[:, a], gx)
        U_cols.append(_pad(psi[:, b], gy))
        V_cols.append(w)
    U = np.column_stack(U_cols)
    V = np.column_stack(V_cols)
    keep = (np.abs(U).max(axis=0) > 0) & (np.abs(V).max(axis=0) > 0)
    if not np.any(keep):
        return np.zeros((1, 1)), np.zeros((1, 1))
    return U[:, keep], V[:, keep]


def lift_boundary(spec: ProblemSpec, n: int, low_rank: bool = False) -> Lifting:
    """Subtract a boundary interpolant and return the homogeneous problem's RHS.

    The returned RHS is C f C^T - (C g L_x^T + L_y g C^T) in the range space,
    truncated to n x n; dense, or factored when ``low_rank`` is set.
    """
    U, V = lifting_factors(spec) if not spec.homogeneous else (np.zeros((1, 1)), np.zeros((1, 1)))
    g = Cheb2D(U @ V.T)
    f_size = n + spec.pad
    size = max(f_size, U.shape[0], V.shape[0])
    rho_y = rho_coefficients(spec.rho_y, "y", spec.rho_samples) if spec.rho_y is not None else None
    rho_x = rho_coefficients(spec.rho_x, "x", spec.rho_samples) if spec.rho_x is not None else None
    extra = max([0] + [len(r) for r in (rho_y, rho_x) if r is not None])
    size += extra
    conv, diff_y = range_operators(spec.order, size, rho_y)
    _, diff_x = range_operators(spec.order, size, rho_x)
    Up, Vp = _pad_rows(U, size), _pad_rows(V, size)
    F = _pad_rows(_pad_rows(rhs_coefficients(spec, f_size), size).T, size).T

    if low_rank:
        Ff = aca(F, spec.aca_tolerance)
        parts = [(conv.dot(Ff.U)[:n], conv.dot(Ff.V)[:n])]
        if not spec.homogeneous:
            parts += [(-conv.dot(Up)[:n], diff_x.dot(Vp)[:n]),
                      (-diff_y.dot(Up)[:n], conv.dot(Vp)[:n])]
        total = stack(*parts)
        rhs = compress(total.U, total.V, spec.aca_tolerance)
        logger.debug(f"Low-rank RHS: f rank {Ff.r}, total rank {rhs.r}")
    else:
        full = _sandwich(conv, F, conv)
        if not spec.homogeneous:
            full = full - conv.dot(Up) @ diff_x.dot(Vp).T - diff_y.dot(Up) @ conv.dot(Vp).T
        rhs = full[:n, :n]
    return Lifting(g=g, U=U, V=V, rhs=rhs)


def _sandwich(left: BandedMatrix, F: np.ndarray, right: BandedMatrix) -> np.ndarray:
    """left F right^T."""
    return right.dot(left.dot(F).T).T


def _pad(v: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    out[: len(v)] = v[:size]
    return out


def _pad_rows(M: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size, M.shape[1]))
    rows = min(size, M.shape[0])
    out[:rows] = M[:rows]
    return out


# ----- assembly ----------------------------------------------------------------

def assemble(spec: ProblemSpec, n: int, F: Union[np.ndarray, LowRankRHS, None] = None
             ) -> SylvesterSystem:
    """The n x n generalized Sylvester system for homogeneous boundary data.

    ``F`` overrides the right-hand side (e.g. a lifted one); by default it is
    C f C^T from ``spec.rhs``.
    """
    if n < 1:
        raise ValueError(f"Truncation must be positive, got {n}")
    ops_y = direction_operators(spec, "y", n)
    ops_x = direction_operators(spec, "x", n)
    if F is None:
        if not spec.homogeneous:
            raise ConfigError("Nonhomogeneous boundary data must be lifted first", "bc")
        F = lift_boundary(spec, n).rhs
    same_bcs = [_bc_key(b) for b in ops_y.constraints] == [_bc_key(b) for b in ops_x.constraints]
    symmetric = same_bcs and spec.rho_x is None and spec.rho_y is None
    return SylvesterSystem(
        A1=ops_y.conv,
        B1=ops_x.conv.T,
        A2=ops_y.diff,
        B2=ops_x.diff.T,
        F=F,
        back_transforms=(ops_y.transform, ops_x.transform),
        symmetric=symmetric,
    )


def _bc_key(b: BoundarySpec) -> Tuple[BCKind, bool, float]:
    return b.kind, b.at_lower_end, b.theta


def back_transform(X: Union[np.ndarray, LowRankSolution], transforms: Tuple[TransformOp, TransformOp]
                   ) -> np.ndarray:
    """Chebyshev coefficients T_y X T_x^T of a recombined-basis solution."""
    Ty, Tx = transforms[0].matrix, transforms[1].matrix
    if isinstance(X, LowRankSolution):
        return (Ty.dot(X.Z) * X.D[None, :]) @ Tx.dot(X.Y).T
    return Tx.dot(Ty.dot(X).T).T


def evaluate_recombined(X: np.ndarray, transforms: Tuple[TransformOp, TransformOp],
                        x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Values on the grid straight from recombined coefficients; result[a, b] = u(x[b], y[a])."""
    Ty = transforms[0].matrix.to_dense()
    Tx = transforms[1].matrix.to_dense()
    basis_y = C.chebval(np.asarray(y, dtype=float), Ty)  # (n, len(y))
    basis_x = C.chebval(np.asarray(x, dtype=float), Tx)
    return basis_y.T @ X @ basis_x


def level_system(spec: ProblemSpec, n: int) -> Tuple[SylvesterSystem, Lifting]:
    """Lift the boundary data and assemble the level-n system."""
    lifting = lift_boundary(spec, n, low_rank=spec.solver == FADI)
    return assemble(spec, n, lifting.rhs), lifting


def level_schedule(spec: ProblemSpec, sys: SylvesterSystem, order: str
                   ) -> Tuple[ShiftSchedule, SpectralInterval, SpectralInterval]:
    n = sys.n
    ops_y = DirectionOperators(sys.A1, sys.A2, sys.back_transforms[0], spec.constraints("y"))
    ops_x = DirectionOperators(sys.B1.T, sys.B2.T, sys.back_transforms[1], spec.constraints("x"))
    left = direction_interval(spec, "y", ops_y)
    right = direction_interval(spec, "x", ops_x)
    schedule = schedule_for(left, right, spec.tolerance, order)
    logger.debug(f"n={n}: left {left.lo:.3e}..{left.hi:.3e}, right {right.lo:.3e}..{right.hi:.3e}, k={schedule.k}")
    return schedule, left, right


# ----- driver ------------------------------------------------------------------

@dataclass
class LevelResult:
    """Everything one level of the driver produced."""
    X: np.ndarray  # recombined basis
    coeffs: np.ndarray  # Chebyshev coefficients, lifting not yet added
    system: SylvesterSystem
    lifting: Lifting
    report: LevelReport


def solve_level(spec: ProblemSpec, n: int, X_prev: Optional[np.ndarray] = None) -> LevelResult:
    """Lift, assemble, choose shifts and solve at truncation n.

    Plain ADI warm-restarts from ``X_prev`` with descending shifts when it is
    given; otherwise the solve starts from zero with ascending shifts.
    """
    sys, lifting = level_system(spec, n)
    warm = X_prev is not None and spec.solver == ADI
    order = DESCENDING if warm else ASCENDING
    schedule, left, right = level_schedule(spec, sys, order)

    if spec.solver == ORACLE:
        t0 = time.perf_counter()
        X = kron_solve(sys)
        solve = SolveReport(n=n, terminated_by="direct", wall_time=time.perf_counter() - t0)
    elif spec.solver == FADI:
        solution, solve = fadi_solve(sys, schedule, spec.tolerance, spec.check_every)
        X = solution.to_dense()
    else:
        X0 = warm_restart(X_prev, n) if warm else None
        X, solve = adi_solve(sys, schedule, X0, spec.tolerance, spec.check_every)

    coeffs = back_transform(X, sys.back_transforms)
    resolved = is_resolved(Cheb2D(coeffs), spec.tolerance)
    logger.info(
        f"Level n={n}: k={schedule.k}, {solve.iterations_run} iterations, "
        f"{'resolved' if resolved else 'unresolved'}"
    )
    return LevelResult(X, coeffs, sys, lifting, LevelReport(n, left, right, schedule.k, order, solve, resolved))


def solve_auto(spec: ProblemSpec) -> Tuple[Cheb2D, AutoReport]:
    """Double n from 16 until the solution's trailing coefficients vanish.

    The first level starts from zero with ascending shifts; later levels
    warm-restart from the padded previous iterate with descending shifts.
    Factored ADI levels always start from zero in ascending order.
    """
    if spec.solver == ORACLE and spec.max_n > ORACLE_MAX_N:
        raise OracleSizeError(f"Oracle solver refuses max_n {spec.max_n} > {ORACLE_MAX_N}")

    start = time.perf_counter()
    report = AutoReport()
    n = spec.initial_n
    X_prev: Optional[np.ndarray] = None
    while True:
        result = solve_level(spec, n, X_prev)
        report.levels.append(result.report)
        report.lifting_rank = 0 if spec.homogeneous else result.lifting.rank
        if isinstance(result.system.F, LowRankRHS):
            report.rhs_rank = result.system.F.r
        best = _add_lifting(result.coeffs, result.lifting.g)
        if result.report.resolved:
            break
        if 2 * n > spec.max_n:
            report.checks["coefficient_residual"] = coefficient_residual(result.system, result.X)
            report.wall_time = time.perf_counter() - start
            raise UnresolvedError(
                f"Solution not resolved at n={n} (max_n={spec.max_n})", best=best, report=report
            )
        X_prev = result.X
        n *= 2

    report.checks["coefficient_residual"] = coefficient_residual(result.system, result.X)
    report.wall_time = time.perf_counter() - start
    return best, report


def shift_report(n: int, eps: float) -> Tuple[SpectralInterval, ShiftSchedule]:
    """Interval and shifts for the n x n zero-Dirichlet Poisson system."""
    interval = reciprocal_interval(second_order_bounds(n))
    return interval, schedule_for(interval, interval, eps)


def _add_lifting(coeffs: np.ndarray, g: Cheb2D) -> Cheb2D:
    rows = max(coeffs.shape[0], g.shape[0])
    cols = max(coeffs.shape[1], g.shape[1])
    out = np.zeros((rows, cols))
    out[: coeffs.shape[0], : coeffs.shape[1]] += coeffs
    out[: g.shape[0], : g.shape[1]] += g.coeffs
    return Cheb2D(out)


# ----- verification ------------------------------------------------------------

def boundary_error(spec: ProblemSpec, u: Cheb2D, samples: int = 100) -> float:
    """Largest mismatch between boundary functionals of u and the data."""
    t = np.linspace(-1.0, 1.0, samples)
    du_dx = C.chebder(u.coeffs, axis=1) if u.shape[1] > 1 else np.zeros((u.shape[0], 1))
    du_dy = C.chebder(u.coeffs, axis=0) if u.shape[0] > 1 else np.zeros((1, u.shape[1]))
    worst = 0.0
    for b in spec.bcs:
        fixed = np.full_like(t, -1.0 if b.at_lower_end else 1.0)
        x, y = (fixed, t) if b.side in ("left", "right") else (t, fixed)
        deriv = du_dx if b.side in ("left", "right") else du_dy
        value = C.chebval2d(y, x, u.coeffs)
        slope = C.chebval2d(y, x, deriv)
        if b.kind is BCKind.DIRICHLET:
            got = value
        elif b.kind is BCKind.NEUMANN:
            got = slope
        else:
            got = value + (-b.theta if b.at_lower_end else b.theta) * slope
        want = np.broadcast_to(b.data(x, y), t.shape) if b.data is not None else 0.0
        worst = max(worst, float(np.max(np.abs(got - want))))
    return worst


def grid_error(u: Cheb2D, exact: Callable, size: int = 101) -> float:
    """Max error against a closed form on a uniform size x size grid."""
    x = np.linspace(-1.0, 1.0, size)
    values = evaluate_grid(u, x, x)
    X, Y = np.meshgrid(x, x)
    return float(np.max(np.abs(values - exact(X, Y))))


def coefficient_residual(sys: SylvesterSystem, X: np.ndarray) -> float:
    """||A1 X B2 + A2 X B1 - F||_F / ||F||_F (absolute when F = 0)."""
    residual = sys.residual(X)
    scale = np.linalg.norm(sys.F_dense)
    return residual / scale if scale > 0 else residual
