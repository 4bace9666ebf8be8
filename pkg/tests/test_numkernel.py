import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfree import numkernel as nk
from cfree.errors import DimensionMismatchError, SingularMatrixError


def test_inner_unit_vectors():
    e0 = np.array([1, 0], dtype=complex)
    e1 = np.array([0, 1], dtype=complex)
    assert nk.inner(e0, e0) == 1
    assert nk.inner(e0, e1) == 0


def test_inner_conjugate_linear_second_argument():
    x = np.array([1 + 1j, 0])
    y = np.array([1j, 0])
    assert nk.inner(x, y) == pytest.approx(1 - 1j)


def test_inner_dim_mismatch():
    with pytest.raises(DimensionMismatchError):
        nk.inner(np.ones(2), np.ones(3))


def test_inverse_identity_and_diagonal():
    assert np.allclose(nk.inverse(np.eye(3)), np.eye(3))
    assert np.allclose(nk.inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))


def test_inverse_two_by_two_resolvent():
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    m = np.eye(2) - 0.1 * flip
    expected = np.array([[1, 0.1], [0.1, 1]]) / 0.99
    assert np.allclose(nk.inverse(m), expected, atol=1e-14)


def test_inverse_rejects_singular():
    with pytest.raises(SingularMatrixError):
        nk.inverse(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_spectral_norm_examples():
    assert nk.spectral_norm(np.eye(4)) == pytest.approx(1.0, abs=1e-12)
    assert nk.spectral_norm(np.array([[0, 1], [1, 0]])) == pytest.approx(1.0, abs=1e-12)
    assert nk.spectral_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0, abs=1e-12)


def test_matmul_apply_examples():
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.allclose(nk.matmul(flip, flip), np.eye(2))
    v = np.array([2.0, 3.0 + 1j])
    assert np.allclose(nk.apply(np.eye(2), v), v)
    with pytest.raises(DimensionMismatchError):
        nk.matmul(np.ones((2, 3)), np.ones((2, 2)))


def _random_matrix(seed, n):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_inverse_residual_invariant(seed, n):
    m = _random_matrix(seed, n) + 3 * np.eye(n)
    inv = nk.inverse(m)
    resid = nk.spectral_norm(m @ inv - np.eye(n))
    bound = 1e-10 * (1 + nk.spectral_norm(m) * nk.spectral_norm(inv))
    assert resid <= bound


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_spectral_norm_submultiplicative(seed, n):
    a = _random_matrix(seed, n)
    b = _random_matrix(seed + 1, n)
    assert nk.spectral_norm(a @ b) <= nk.spectral_norm(a) * nk.spectral_norm(b) + 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_inner_hermitian_symmetry(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert nk.inner(x, y) == pytest.approx(np.conj(nk.inner(y, x)), abs=1e-12)
    assert nk.inner(x, x).imag == pytest.approx(0.0, abs=1e-12)
    assert nk.inner(x, x).real >= 0


def test_json_roundtrip():
    m = _random_matrix(3, 4)
    assert np.allclose(nk.matrix_from_json(nk.matrix_to_json(m)), m)
    v = np.array([1 + 2j, -3.5])
    assert np.allclose(nk.vector_from_json(nk.vector_to_json(v)), v)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        nk.as_cmatrix(np.array([[np.inf, 0], [0, 1]]))
    with pytest.raises(ValueError):
        nk.as_cvector(np.array([np.nan, 0.0]))
