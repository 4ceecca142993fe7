import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfusion.errors import AllVectorsNumericallyZero, NotHermitian, NotPositiveDefinite
from cfusion.numerics import (
    Tolerances,
    hermitian_extremes,
    orthonormalize,
    solve_hpd,
    spectral_norm,
)

SKEW = np.array([[1.5, 0.5], [0.5, 0.5]])


def test_orthonormalize_single_basis_vector():
    B = orthonormalize([[1.0, 0.0]])
    assert B.shape == (2, 1)
    np.testing.assert_allclose(B[:, 0], [1, 0], atol=1e-15)


def test_orthonormalize_duplicate_direction():
    B = orthonormalize([[1.0, 1.0], [2.0, 2.0]])
    assert B.shape == (2, 1)
    np.testing.assert_allclose(B[:, 0], np.array([1, 1]) / np.sqrt(2), atol=1e-15)


def test_orthonormalize_gram_schmidt_order():
    vecs = [np.array([1.0, 0.0]), np.array([1.0, 1.0])]
    B = orthonormalize(vecs)
    assert B.shape == (2, 2)
    np.testing.assert_allclose(B.conj().T @ B, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(B[:, 0], [1, 0], atol=1e-15)
    np.testing.assert_allclose(np.abs(B[:, 1]), [0, 1], atol=1e-15)
    # span equality: each input is reproduced by least squares on the basis
    for v in vecs:
        coef = np.linalg.lstsq(B, v, rcond=None)[0]
        assert np.linalg.norm(B @ coef - v) < 1e-10


def test_orthonormalize_rejects_zero():
    with pytest.raises(AllVectorsNumericallyZero):
        orthonormalize([[0.0, 0.0], [0.0, 0.0]])


def test_orthonormalize_rank_cutoff():
    tiny = Tolerances(rank_tol=1e-6)
    B = orthonormalize([[1.0, 0.0], [1.0, 1e-9]], tiny)
    assert B.shape[1] == 1


@settings(max_examples=1000)
@given(seed=st.integers(0, 2**32 - 1))
def test_orthonormalize_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 13))
    m = int(rng.integers(1, 13))
    r = int(rng.integers(1, min(n, m) + 1))
    A = (rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))) @ \
        (rng.standard_normal((r, m)) + 1j * rng.standard_normal((r, m)))
    B = orthonormalize(A)
    k = B.shape[1]
    assert k == r
    assert np.linalg.norm(B.conj().T @ B - np.eye(k), 2) <= 1e-10
    # every column of A lies in span(B)
    assert np.linalg.norm(A - B @ (B.conj().T @ A)) <= 1e-9 * np.linalg.norm(A)


def test_orthonormalize_deterministic(rng):
    A = rng.standard_normal((5, 3))
    np.testing.assert_array_equal(orthonormalize(A), orthonormalize(A.copy()))


def test_hermitian_extremes_identity():
    assert hermitian_extremes(np.eye(3)) == pytest.approx((1.0, 1.0), abs=1e-15)


def test_hermitian_extremes_two_by_two():
    # characteristic polynomial t^2 - 2t + 0.5
    tr, det = 2.0, 0.5
    disc = np.sqrt((tr / 2) ** 2 - det)
    lo, hi = hermitian_extremes(SKEW)
    assert lo == pytest.approx(tr / 2 - disc, abs=1e-14)
    assert hi == pytest.approx(tr / 2 + disc, abs=1e-14)
    assert lo == pytest.approx(0.29289, abs=1e-5)
    assert hi == pytest.approx(1.70711, abs=1e-5)


def test_hermitian_extremes_diag():
    assert hermitian_extremes(np.diag([0.0, 2.0])) == (0.0, 2.0)


def test_hermitian_extremes_rejects_asymmetric():
    with pytest.raises(NotHermitian):
        hermitian_extremes(np.array([[1.0, 1.0], [0.0, 1.0]]))


@settings(max_examples=200)
@given(seed=st.integers(0, 2**32 - 1))
def test_hermitian_extremes_bracket_rayleigh_quotients(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    M = A + A.conj().T
    lo, hi = hermitian_extremes(M)
    X = rng.standard_normal((10_000, n)) + 1j * rng.standard_normal((10_000, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    rq = np.einsum("ij,jk,ik->i", X.conj(), M, X).real
    assert rq.max() <= hi + 1e-8
    assert rq.min() >= lo - 1e-8


def test_spectral_norm_examples():
    assert spectral_norm(np.zeros((2, 3))) == 0.0
    assert spectral_norm(np.eye(4)) == pytest.approx(1.0, abs=1e-15)
    assert spectral_norm(np.diag([3.0, 4.0])) == pytest.approx(4.0, abs=1e-14)


@settings(max_examples=300)
@given(seed=st.integers(0, 2**32 - 1))
def test_spectral_norm_matches_gram_eigenvalue(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 8, size=2)
    M = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    _, hi = hermitian_extremes(M.conj().T @ M)
    assert spectral_norm(M) == pytest.approx(np.sqrt(hi), abs=1e-9)


def test_solve_hpd_examples():
    b = np.array([0.3, -2.0])
    np.testing.assert_allclose(solve_hpd(np.eye(2), b), b, atol=1e-15)
    np.testing.assert_allclose(solve_hpd(2 * np.eye(2), b), b / 2, atol=1e-15)
    # adjugate / determinant: inverse = [[0.5, -0.5], [-0.5, 1.5]] / 0.5
    inv = np.array([[0.5, -0.5], [-0.5, 1.5]]) / 0.5
    expected = inv @ np.array([1.0, 0.0])
    np.testing.assert_allclose(expected, [1.0, -1.0])
    np.testing.assert_allclose(solve_hpd(SKEW, [1.0, 0.0]), expected, atol=1e-14)


def test_solve_hpd_rejects_semidefinite():
    with pytest.raises(NotPositiveDefinite):
        solve_hpd(np.diag([1.0, 0.0]), [1.0, 1.0])


def test_solve_hpd_residual(rng):
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    M = A @ A.conj().T + 0.1 * np.eye(6)
    b = rng.standard_normal(6)
    x = solve_hpd(M, b)
    assert np.linalg.norm(M @ x - b) <= 1e-8 * np.linalg.norm(b)


def test_tolerances_validation():
    with pytest.raises(ValueError):
        Tolerances(rank_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(rank_tol=1.5)
