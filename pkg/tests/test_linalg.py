import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchbandits.linalg import LinAlgInputError, apply, sym_eig, thin_svd_rows


def test_sym_eig_identity():
    eig = sym_eig(np.eye(3))
    np.testing.assert_allclose(eig.values, [1, 1, 1])
    np.testing.assert_allclose(eig.vectors @ eig.vectors.T, np.eye(3), atol=1e-12)


def test_sym_eig_diagonal_sorted_descending():
    eig = sym_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(eig.values, [3, 2, 1])
    np.testing.assert_allclose(np.abs(eig.vectors), np.eye(3)[[0, 2, 1]], atol=1e-12)


def test_sym_eig_random_reconstruction(rng):
    A = rng.standard_normal((8, 8))
    A = A + A.T
    eig = sym_eig(A)
    assert np.all(np.diff(eig.values) <= 0)
    assert np.linalg.norm(A - eig.reconstruct()) <= 1e-8 * (1 + np.linalg.norm(A))
    np.testing.assert_allclose(eig.vectors @ eig.vectors.T, np.eye(8), atol=1e-10)


@pytest.mark.parametrize(
    "A",
    [np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([[np.nan, 0.0], [0.0, 1.0]]), np.ones((2, 3))],
    ids=["asymmetric", "nan", "non-square"],
)
def test_sym_eig_rejects_bad_input(A):
    with pytest.raises(LinAlgInputError):
        sym_eig(A)


def test_thin_svd_single_row():
    sigma, Vt = thin_svd_rows(np.array([[2.0, 0.0, 0.0]]))
    np.testing.assert_allclose(sigma, [2.0])
    np.testing.assert_allclose(np.abs(Vt), [[1.0, 0.0, 0.0]])


def test_thin_svd_orthonormal_rows():
    sigma, _ = thin_svd_rows(np.eye(3)[:2])
    np.testing.assert_allclose(sigma, [1.0, 1.0])


def test_thin_svd_matches_sym_eig_oracle(rng):
    M = rng.standard_normal((4, 16))
    sigma, Vt = thin_svd_rows(M)
    top = sym_eig(M.T @ M).values[:4]
    np.testing.assert_allclose(sigma**2, top, rtol=1e-8)
    np.testing.assert_allclose(Vt @ Vt.T, np.eye(4), atol=1e-10)
    np.testing.assert_allclose(Vt.T @ np.diag(sigma**2) @ Vt, M.T @ M, atol=1e-8 * np.linalg.norm(M) ** 2)


def test_thin_svd_rejects_tall():
    with pytest.raises(LinAlgInputError):
        thin_svd_rows(np.ones((4, 3)))
    with pytest.raises(LinAlgInputError):
        thin_svd_rows(np.array([[np.inf, 1.0]]))


def test_apply():
    v = np.array([1.0, 1.0])
    np.testing.assert_array_equal(apply(np.eye(2), v), v)
    np.testing.assert_array_equal(apply(np.zeros((2, 2)), v), [0, 0])
    np.testing.assert_array_equal(apply([[1, 2], [3, 4]], v), [3, 7])
    with pytest.raises(LinAlgInputError):
        apply(np.eye(2), np.ones(3))


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 6), extra=st.integers(0, 10), seed=st.integers(0, 2**32 - 1))
def test_thin_svd_property(m, extra, seed):
    M = np.random.default_rng(seed).standard_normal((m, m + extra))
    sigma, Vt = thin_svd_rows(M)
    assert np.all(sigma >= 0) and np.all(np.diff(sigma) <= 1e-12)
    np.testing.assert_allclose(Vt @ Vt.T, np.eye(m), atol=1e-10)
    oracle = np.sort(np.linalg.eigvalsh(M.T @ M))[::-1][:m]
    np.testing.assert_allclose(sigma**2, oracle, rtol=1e-8, atol=1e-10 * oracle[0])
