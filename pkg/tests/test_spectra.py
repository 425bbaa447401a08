"""Tests for spectral enclosures of the 1D operators.

Closed-form bounds are checked against all eigenvalues of the truncated
pencils (QZ), and against the power-iteration oracle.
"""
# Created: 2026-10-18

import numpy as np
import pytest

from uspoisson.errors import ConvergenceError, SpectrumError
from uspoisson.oracle import LARGEST, SMALLEST, extreme_eigs, pencil_eigenvalues
from uspoisson.poisson import BIHARMONIC, ProblemSpec, direction_operators
from uspoisson.spectra import (
    CharCoeffs, SpectralInterval, char_coeffs_dirichlet2, dirichlet2_bounds,
    dominant_eigenvalue, empirical_interval, fourth_order_bounds, newton_bound,
    reciprocal_interval, second_order_bounds, shifted_interval,
)

from conftest import clamped_bcs, dirichlet_bcs, mixed_bcs


def operator_eigenvalues(spec, m):
    """Eigenvalues of (L T) v = lambda (C T) v at size m, real parts."""
    ops = direction_operators(spec, "x", m)
    values = pencil_eigenvalues(ops.diff, ops.conv)
    assert np.max(np.abs(values.imag)) <= 1e-8 * np.max(np.abs(values))
    return values.real


class TestDirichletBounds:
    """Closed-form second-order enclosure."""

    @pytest.mark.parametrize("m", [16, 32, 64, 128])
    def test_contains_and_is_tight(self, m):
        """Every eigenvalue is inside, and both ends are within 9%."""
        lam = operator_eigenvalues(ProblemSpec(bcs=dirichlet_bcs()), m)
        bounds = second_order_bounds(m)
        assert bounds.lo <= lam.min() and lam.max() <= bounds.hi
        assert (abs(bounds.lo) - abs(lam.min())) / abs(lam.min()) < 0.09
        assert (abs(lam.max()) - abs(bounds.hi)) / abs(lam.max()) < 0.09

    def test_power_iteration_agrees_with_qz(self):
        spec = ProblemSpec(bcs=dirichlet_bcs())
        ops = direction_operators(spec, "x", 16)
        lam = operator_eigenvalues(spec, 16)
        assert extreme_eigs(ops.diff, ops.conv, LARGEST) == pytest.approx(lam.min(), rel=1e-6)
        assert extreme_eigs(ops.diff, ops.conv, SMALLEST) == pytest.approx(lam.max(), rel=1e-6)

    def test_degree_four_by_hand(self):
        """Degree 4: eigenvalues are the roots of 35l^2 + 864l + 1920 and of 20l + 192."""
        lam = np.sort(operator_eigenvalues(ProblemSpec(bcs=dirichlet_bcs()), 3))
        roots = np.sort(np.concatenate([np.roots([35.0, 864.0, 1920.0]), [-9.6]]))
        np.testing.assert_allclose(lam, roots, rtol=1e-10)
        bounds = dirichlet2_bounds(4)
        assert bounds.lo <= lam.min() and lam.max() <= bounds.hi

    def test_needs_degree_four(self):
        with pytest.raises(ValueError):
            dirichlet2_bounds(3)


class TestCharacteristicCoefficients:
    """Newton bounds on the odd and even families."""

    def test_degree_four_values(self):
        a, b = char_coeffs_dirichlet2(4)
        np.testing.assert_allclose(a.values, [20.0, 192.0], rtol=1e-12)
        np.testing.assert_allclose(b.values, [35.0, 864.0, 1920.0], rtol=1e-12)

    @pytest.mark.parametrize("n", [16, 32, 64])
    def test_families_enclose_every_eigenvalue(self, n):
        """The union of both families' Newton bounds holds all |lambda|."""
        lam = np.abs(operator_eigenvalues(ProblemSpec(bcs=dirichlet_bcs()), n - 1))
        lows, highs = zip(*(newton_bound(c) for c in char_coeffs_dirichlet2(n)))
        assert min(lows) <= lam.min() * (1 + 1e-9)
        assert lam.max() <= max(highs) * (1 + 1e-9)

    def test_huge_degree_stays_in_log_space(self):
        """Coefficients overflow doubles but the bound does not."""
        a, b = char_coeffs_dirichlet2(4096)
        with pytest.raises(SpectrumError):
            b.values
        lower, upper = newton_bound(b)
        assert 0 < lower < upper < np.inf

    def test_complex_roots_raise(self):
        """l^2 + 1 has no real roots."""
        with pytest.raises(SpectrumError):
            newton_bound(CharCoeffs.from_values([1.0, 0.0, 1.0]))

    def test_odd_degree_rejected(self):
        with pytest.raises(ValueError):
            char_coeffs_dirichlet2(7)


@pytest.mark.parametrize("m", [16, 32])
def test_fourth_order_bounds_contain_clamped_spectrum(m):
    lam = operator_eigenvalues(ProblemSpec(equation=BIHARMONIC, bcs=clamped_bcs()), m)
    bounds = fourth_order_bounds(m)
    assert lam.min() > 0
    assert bounds.lo <= lam.min() * (1 + 1e-9)
    assert lam.max() <= bounds.hi * (1 + 1e-9)


class TestIntervals:
    """Interval arithmetic for reciprocals and rho shifts."""

    def test_reciprocal(self):
        r = reciprocal_interval(SpectralInterval(-4.0, -2.0))
        assert (r.lo, r.hi) == (-0.5, -0.25)
        assert r.reciprocal

    def test_reciprocal_of_interval_through_zero(self):
        with pytest.raises(SpectrumError):
            reciprocal_interval(SpectralInterval(-1.0, 1.0))

    def test_out_of_order_bounds(self):
        with pytest.raises(SpectrumError):
            SpectralInterval(1.0, -1.0)

    def test_shift_by_positive_rho(self):
        out = shifted_interval(SpectralInterval(-10.0, -2.0), (1.0, 3.0))
        assert (out.lo, out.hi) == (-13.0, -3.0)

    def test_negative_rho_crossing_zero_is_indefinite(self):
        with pytest.raises(SpectrumError):
            shifted_interval(SpectralInterval(-10.0, -2.0), (-5.0, -1.0))

    def test_cannot_shift_reciprocal(self):
        with pytest.raises(SpectrumError):
            shifted_interval(SpectralInterval(-0.5, -0.1, reciprocal=True), (0.0, 1.0))

    def test_contains_with_slack(self):
        s = SpectralInterval(-2.0, -1.0)
        assert s.contains(-1.5)
        assert not s.contains(-0.99)
        assert s.contains(-0.99, rtol=0.01)


class TestPowerIteration:
    """Empirical intervals for directions without closed forms."""

    def test_dominant_eigenvalue_of_diagonal(self):
        d = np.array([1.0, 2.0, 5.0, -3.0])
        assert dominant_eigenvalue(lambda v: d * v, 4) == pytest.approx(5.0, rel=1e-7)

    def test_slow_convergence_raises(self):
        d = np.array([1.0, -0.9999])
        with pytest.raises(ConvergenceError):
            dominant_eigenvalue(lambda v: d * v, 2, iters=5)

    @pytest.mark.parametrize("kind", ["neumann", "robin"])
    def test_empirical_interval_encloses_pencil(self, kind):
        spec = ProblemSpec(bcs=mixed_bcs(kind))
        ops = direction_operators(spec, "x", 24)
        interval = empirical_interval(ops.conv, ops.diff)
        assert interval.reciprocal
        mu = pencil_eigenvalues(ops.conv, ops.diff).real
        assert interval.lo <= mu.min() and mu.max() <= interval.hi
