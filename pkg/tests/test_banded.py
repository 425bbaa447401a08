"""Tests for banded storage, products and LU solves."""
# Created: 2026-10-18

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import sparse

from uspoisson.banded import (
    BandedMatrix, band_add_scaled, band_lu, band_matmul, band_solve,
)
from uspoisson.errors import DimensionError, SingularMatrixError


def banded_dense(rng, nrows, ncols, lower, upper):
    A = rng.standard_normal((nrows, ncols))
    return np.triu(np.tril(A, upper), -lower)


def dominant(rng, n, lower, upper):
    """Diagonally dominant banded matrix (safe to factor)."""
    A = banded_dense(rng, n, n, lower, upper)
    return A + np.diag(np.full(n, lower + upper + 2.0))


band_shapes = st.tuples(
    st.integers(1, 12), st.integers(1, 12), st.integers(0, 3), st.integers(0, 3),
    st.integers(0, 2**32 - 1),
)


class TestBandedMatrix:
    """Storage layout and conversions."""

    @given(band_shapes)
    @settings(max_examples=50, deadline=None)
    def test_dense_conversion_preserves_entries(self, shape):
        """from_dense / to_dense keep every entry in the band."""
        nrows, ncols, lower, upper, seed = shape
        A = banded_dense(np.random.default_rng(seed), nrows, ncols, lower, upper)
        band = BandedMatrix.from_dense(A, lower, upper)
        np.testing.assert_array_equal(band.to_dense(), A)

    def test_storage_layout(self):
        """data[upper + i - j, j] holds A[i, j]."""
        A = np.array([[1.0, 2.0, 0.0], [3.0, 4.0, 5.0], [0.0, 6.0, 7.0]])
        band = BandedMatrix.from_dense(A)
        assert (band.lower, band.upper) == (1, 1)
        assert band.data[1 + 1 - 0, 0] == 3.0
        assert band.data[1 + 0 - 1, 1] == 2.0
        assert band.entry(2, 1) == 6.0
        assert band.entry(0, 2) == 0.0

    def test_from_diagonals(self):
        """Offsets above and below the diagonal land in place."""
        band = BandedMatrix.from_diagonals(4, 4, {0: [1, 2, 3, 4], 2: [5, 6], -1: [0, 7, 8, 9]})
        expected = np.array([
            [1, 0, 5, 0],
            [7, 2, 0, 6],
            [0, 8, 3, 0],
            [0, 0, 9, 4],
        ], dtype=float)
        np.testing.assert_array_equal(band.to_dense(), expected)
        np.testing.assert_array_equal(band.diagonal(2), [5, 6])
        np.testing.assert_array_equal(band.diagonal(-1), [7, 8, 9])

    def test_from_sparse_outside_band_raises(self):
        """Entries outside the declared band are rejected."""
        S = sparse.coo_array(np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        with pytest.raises(DimensionError):
            BandedMatrix.from_sparse(S, 0, 1)

    def test_bad_storage_shape_raises(self):
        """Storage must be (lower + upper + 1, ncols)."""
        with pytest.raises(DimensionError):
            BandedMatrix(3, 3, 1, 1, np.zeros((2, 3)))

    def test_transpose(self, rng):
        """Transposing swaps the bandwidths."""
        A = banded_dense(rng, 6, 5, 2, 1)
        band = BandedMatrix.from_dense(A, 2, 1)
        assert (band.T.lower, band.T.upper) == (1, 2)
        np.testing.assert_array_equal(band.T.to_dense(), A.T)

    def test_truncate(self, rng):
        """Truncation is the leading block."""
        A = banded_dense(rng, 8, 8, 2, 3)
        band = BandedMatrix.from_dense(A, 2, 3)
        np.testing.assert_array_equal(band.truncate(5, 4).to_dense(), A[:5, :4])
        with pytest.raises(DimensionError):
            band.truncate(9)

    def test_scale_columns(self, rng):
        """Column scaling multiplies each column."""
        A = banded_dense(rng, 5, 5, 1, 2)
        w = rng.standard_normal(5)
        scaled = BandedMatrix.from_dense(A, 1, 2).scale_columns(w)
        np.testing.assert_allclose(scaled.to_dense(), A * w[None, :])

    def test_dot_and_rdot(self, rng):
        """Left and right products match dense ones."""
        A = banded_dense(rng, 6, 6, 1, 2)
        band = BandedMatrix.from_dense(A, 1, 2)
        X = rng.standard_normal((6, 3))
        np.testing.assert_allclose(band.dot(X), A @ X)
        np.testing.assert_allclose(band.rdot(X.T), X.T @ A)
        with pytest.raises(DimensionError):
            band.dot(np.ones((5, 2)))


# ----- arithmetic -----------------------------------------------------------------

@given(st.integers(2, 10), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_band_matmul_matches_dense(n, lower, upper, seed):
    """Bandwidths add and the product is exact."""
    rng = np.random.default_rng(seed)
    A = banded_dense(rng, n, n, lower, upper)
    B = banded_dense(rng, n, n, upper, lower)
    product = band_matmul(BandedMatrix.from_dense(A, lower, upper), BandedMatrix.from_dense(B, upper, lower))
    np.testing.assert_allclose(product.to_dense(), A @ B, atol=1e-12)


def test_band_add_scaled(rng):
    """A + s B with different bandwidths."""
    A = banded_dense(rng, 5, 5, 0, 2)
    B = banded_dense(rng, 5, 5, 1, 0)
    out = band_add_scaled(BandedMatrix.from_dense(A, 0, 2), BandedMatrix.from_dense(B, 1, 0), -2.5)
    assert (out.lower, out.upper) == (1, 2)
    np.testing.assert_allclose(out.to_dense(), A - 2.5 * B)


def test_band_add_scaled_shape_mismatch():
    with pytest.raises(DimensionError):
        band_add_scaled(BandedMatrix.identity(3), BandedMatrix.identity(4), 1.0)


# ----- LU -------------------------------------------------------------------------

@given(st.integers(1, 12), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_band_solve_both_sides(n, lower, upper, seed):
    """One factorization solves M X = R and X M = R."""
    rng = np.random.default_rng(seed)
    M = dominant(rng, n, lower, upper)
    F = band_lu(BandedMatrix.from_dense(M, lower, upper))
    R = rng.standard_normal((n, 3))

    np.testing.assert_allclose(band_solve(F, R, 'left'), np.linalg.solve(M, R), atol=1e-10)
    np.testing.assert_allclose(
        band_solve(F, R.T, 'right'), np.linalg.solve(M.T, R).T, atol=1e-10
    )


def test_band_solve_vector(rng):
    M = dominant(rng, 7, 2, 2)
    F = band_lu(BandedMatrix.from_dense(M, 2, 2))
    b = rng.standard_normal(7)
    x = band_solve(F, b)
    assert x.shape == (7,)
    np.testing.assert_allclose(M @ x, b, atol=1e-12)


def test_band_lu_pivots(rng):
    """A zero leading entry needs partial pivoting, not a failure."""
    M = np.array([[0.0, 1.0, 0.0], [2.0, 3.0, 1.0], [0.0, 1.0, 4.0]])
    F = band_lu(BandedMatrix.from_dense(M, 1, 1))
    b = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(band_solve(F, b), np.linalg.solve(M, b))


def test_singular_matrix_raises():
    """An exact zero pivot names its column."""
    M = BandedMatrix.from_diagonals(3, 3, {0: [1.0, 0.0, 2.0]})
    with pytest.raises(SingularMatrixError) as exc_info:
        band_lu(M)
    assert exc_info.value.column == 1


def test_band_lu_rejects_rectangular():
    with pytest.raises(DimensionError):
        band_lu(BandedMatrix.zeros(3, 4, 1, 1))


def test_band_solve_bad_side(rng):
    F = band_lu(BandedMatrix.identity(3))
    with pytest.raises(ValueError):
        band_solve(F, np.ones(3), 'middle')
