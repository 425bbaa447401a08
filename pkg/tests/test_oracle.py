"""Tests for the dense reference computations."""
# Created: 2026-10-18

import numpy as np
import pytest

from uspoisson.banded import BandedMatrix
from uspoisson.errors import OracleSizeError, ShiftCollisionError
from uspoisson.oracle import (
    KRON_MAX_N, LARGEST, SMALLEST, extreme_eigs, kron_solve, scalar_adi,
)
from uspoisson.poisson import ORACLE, ProblemSpec, direction_operators, solve_auto
from uspoisson.zolotarev import shifts

from conftest import dirichlet_bcs, random_system


def test_kron_solve_satisfies_the_system(dirichlet_spec):
    sys = random_system(dirichlet_spec, 12, seed=3)
    X = kron_solve(sys)
    assert sys.residual(X) <= 1e-10 * np.linalg.norm(sys.F_dense)


def test_kron_solve_refuses_large_systems(dirichlet_spec):
    sys = random_system(dirichlet_spec, KRON_MAX_N + 1)
    with pytest.raises(OracleSizeError):
        kron_solve(sys)


def test_extreme_eigs_rejects_unknown_mode(dirichlet_spec):
    ops = direction_operators(dirichlet_spec, "x", 8)
    with pytest.raises(ValueError):
        extreme_eigs(ops.diff, ops.conv, "middle")


def test_extreme_eigs_stays_banded(dirichlet_spec, monkeypatch):
    ops = direction_operators(dirichlet_spec, "x", 16)

    def no_dense(self):
        raise AssertionError("dense copy of a banded operator")

    monkeypatch.setattr(BandedMatrix, "to_dense", no_dense)
    largest = extreme_eigs(ops.diff, ops.conv, LARGEST)
    smallest = extreme_eigs(ops.diff, ops.conv, SMALLEST)
    assert largest < smallest < 0


def test_scalar_adi_collision():
    schedule = shifts(1.0, 10.0, -10.0, -1.0, 2)
    with pytest.raises(ShiftCollisionError) as excinfo:
        scalar_adi(schedule.p[1], -5.0, schedule)
    assert excinfo.value.index == 1


def test_scalar_adi_single_shift():
    """One pair gives (lam - q)(mu - p) / ((lam - p)(mu - q))."""
    schedule = shifts(1.0, 10.0, -10.0, -1.0, 1)
    p, q = schedule.p[0], schedule.q[0]
    expected = (2.0 - q) * (-3.0 - p) / ((2.0 - p) * (-3.0 - q))
    assert scalar_adi(2.0, -3.0, schedule) == pytest.approx(expected)


def test_oracle_solver_refuses_large_max_n():
    spec = ProblemSpec(bcs=dirichlet_bcs(), solver=ORACLE, max_n=128)
    with pytest.raises(OracleSizeError):
        solve_auto(spec)
