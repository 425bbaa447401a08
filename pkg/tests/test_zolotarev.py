"""Tests for Zolotarev shift generation and the elliptic-function helpers."""
# Created: 2026-10-18

import logging
from math import log, pi, sqrt

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ellipj

from uspoisson.errors import SpectrumError
from uspoisson.oracle import sampled_error_factor
from uspoisson.poisson import shift_report
from uspoisson.spectra import SpectralInterval
from uspoisson.zolotarev import (
    ASCENDING, DESCENDING, MAX_SHIFTS, cross_ratio_gamma, ellip_k, elliptic_params,
    jacobi_dn, mobius_map, schedule_for, shift_count, shifts, zolotarev_bound,
)


def mirrored_intervals(gamma):
    """[a, b] = [1, t] and [c, d] = [-t, -1] with the given cross-ratio."""
    s = 4 * gamma - 2
    t = (s + sqrt(s * s - 4)) / 2
    return 1.0, t, -t, -1.0


class TestEllipticFunctions:
    """K and dn, including the regime where beta is indistinguishable from 1."""

    @pytest.mark.parametrize("beta", [0.0, 0.5, 0.9, 0.999])
    def test_ellip_k_matches_quadrature(self, beta):
        expected, _ = quad(lambda t: 1.0 / sqrt(1.0 - beta**2 * np.sin(t) ** 2), 0.0, pi / 2,
                           epsabs=1e-14, epsrel=1e-13)
        assert ellip_k(beta) == pytest.approx(expected, rel=1e-10)

    def test_ellip_k_near_one_uses_complement(self):
        """K ~ log(4 / sqrt(m1)) as m1 -> 0."""
        m1 = 1e-24
        L = log(4.0 / sqrt(m1))
        assert ellip_k(1.0, m1) == pytest.approx(L + 0.25 * m1 * (L - 1.0), rel=1e-12)

    def test_dn_at_zero_and_at_k(self):
        beta = 0.8
        assert jacobi_dn(0.0, beta) == pytest.approx(1.0)
        assert jacobi_dn(ellip_k(beta), beta) == pytest.approx(0.6, rel=1e-10)

    def test_dn_series_branch_is_continuous(self):
        """Below the cutoff dn comes from its series about m = 1."""
        m1 = 1e-10
        series = jacobi_dn(2.0, 1.0, m1)
        _, _, dn, _ = ellipj(2.0, 1.0 - m1)
        assert series == pytest.approx(dn, abs=1e-9)
        assert series == pytest.approx(1.0 / np.cosh(2.0), abs=1e-8)

    def test_modulus_out_of_range(self):
        with pytest.raises(ValueError):
            ellip_k(1.0)
        with pytest.raises(ValueError):
            jacobi_dn(0.5, -0.1)

    def test_elliptic_params(self):
        alpha, beta = elliptic_params(25 / 16)
        assert alpha == pytest.approx(-1 + 25 / 8 + 2 * sqrt((25 / 16) ** 2 - 25 / 16))
        assert beta == pytest.approx(sqrt(1 - 1 / alpha**2))


class TestMobiusMap:
    """The map sending -alpha, -1, 1, alpha to a, b, c, d."""

    @pytest.mark.parametrize("intervals", [
        (1.0, 10.0, -10.0, -1.0),
        (-3e-7, -1e-12, 2e-12, 5e-6),
        (2.0, 3.0, 5.0, 40.0),
    ])
    def test_maps_the_four_points(self, intervals):
        a, b, c, d = intervals
        alpha, _ = elliptic_params(cross_ratio_gamma(a, b, c, d))
        M = mobius_map(alpha, a, b, c, d)
        scale = max(map(abs, intervals))
        for z, target in ((-alpha, a), (-1.0, b), (1.0, c), (alpha, d)):
            assert abs(M(z) - target) <= 1e-10 * scale

    def test_overlapping_intervals_raise(self):
        with pytest.raises(SpectrumError):
            cross_ratio_gamma(0.0, 2.0, 1.0, 3.0)

    def test_inconsistent_alpha_raises(self):
        with pytest.raises(SpectrumError):
            mobius_map(50.0, 1.0, 10.0, -10.0, -1.0)


class TestShifts:
    """Shift placement and the error factor they achieve."""

    @pytest.mark.parametrize("gamma", [25 / 16, 10.0, 1e3, 1e6])
    @pytest.mark.parametrize("k", [1, 5, 10, 25])
    def test_error_factor_within_bound(self, gamma, k):
        """Sampled max|s| on [a, b] over min|s| on [c, d] stays under the bound."""
        schedule = shifts(*mirrored_intervals(gamma), k)
        assert schedule.gamma == pytest.approx(gamma, rel=1e-10)
        assert sampled_error_factor(schedule) <= zolotarev_bound(gamma, k) * 1.01

    def test_shifts_lie_in_their_intervals(self):
        a, b, c, d = 1.0, 100.0, -50.0, -0.5
        schedule = shifts(a, b, c, d, 12)
        assert all(a <= q <= b for q in schedule.q)
        assert all(c <= p <= d for p in schedule.p)
        assert np.all(np.diff(schedule.q) != 0)

    def test_mirrored_intervals_give_mirrored_shifts(self):
        schedule = shifts(*mirrored_intervals(1e4), 8)
        np.testing.assert_allclose(schedule.p, -np.asarray(schedule.q), rtol=1e-9)

    def test_descending_reverses_ascending(self):
        up = shifts(1.0, 50.0, -50.0, -1.0, 6, ASCENDING)
        down = shifts(1.0, 50.0, -50.0, -1.0, 6, DESCENDING)
        assert down.order == DESCENDING
        assert down.p == up.p[::-1]
        assert down.q == up.q[::-1]
        assert up.reversed().p == down.p

    def test_rational_vanishes_at_q(self):
        schedule = shifts(1.0, 50.0, -50.0, -1.0, 4)
        np.testing.assert_allclose(schedule.rational(schedule.q), 0.0, atol=1e-14)

    def test_to_dict(self):
        data = shifts(1.0, 50.0, -50.0, -1.0, 3).to_dict()
        assert data["k"] == 3
        assert data["order"] == ASCENDING
        assert len(data["p"]) == len(data["q"]) == 3

    def test_needs_a_shift(self):
        with pytest.raises(ValueError):
            shifts(1.0, 2.0, -2.0, -1.0, 0)


class TestShiftCount:
    """k = ceil(log(16 gamma) log(4 / eps) / pi^2)."""

    def test_formula(self):
        gamma, eps = 1e6, 1e-12
        expected = int(np.ceil(log(16 * gamma) * log(4 / eps) / pi**2))
        assert shift_count(gamma, eps) == expected

    def test_at_least_one(self):
        assert shift_count(1.0001, 0.5) >= 1

    def test_capped_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="uspoisson.zolotarev"):
            assert shift_count(1e300, 1e-300) == MAX_SHIFTS
        assert "capped" in caplog.text

    def test_dirichlet_poisson_at_2048(self):
        """The reference count for n = 2048 at machine precision."""
        interval, schedule = shift_report(2048, 2.2e-16)
        assert interval.reciprocal
        assert schedule.k == 102

    def test_schedule_needs_reciprocal_intervals(self):
        s = SpectralInterval(-10.0, -1.0)
        with pytest.raises(SpectrumError):
            schedule_for(s, s, 1e-10)

    def test_schedule_negates_the_right_interval(self):
        s = SpectralInterval(-1.0, -0.1, reciprocal=True)
        schedule = schedule_for(s, s, 1e-8)
        (a, b), (c, d) = schedule.intervals
        assert (a, b) == (-1.0, -0.1)
        assert (c, d) == (0.1, 1.0)
