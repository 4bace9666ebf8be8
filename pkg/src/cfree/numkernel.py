"""Small dense complex linear algebra: inner products, inverses, spectral norms.

Vectors are 1-d and matrices 2-d ``complex128`` numpy arrays throughout.
The inner product is linear in the *first* argument and conjugate-linear in
the second, so that a vector state reads ``inner(apply(a, v), v)``.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, SingularMatrixError

# Pivot threshold for declaring a matrix singular, relative to its norm.
PIVOT_RTOL = 1e-12


def as_cvector(x) -> np.ndarray:
    """Coerce to a finite 1-d complex vector."""
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {v.shape}")
    if not (np.all(np.isfinite(v.real)) and np.all(np.isfinite(v.imag))):
        raise ValueError("vector has non-finite entries")
    return v


def as_cmatrix(x) -> np.ndarray:
    """Coerce to a finite 2-d complex matrix."""
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix has non-finite entries")
    return m


def inner(x, y) -> complex:
    """<x, y>, linear in x and conjugate-linear in y."""
    x = as_cvector(x)
    y = as_cvector(y)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"inner: {x.shape} vs {y.shape}")
    return complex(np.vdot(y, x))


def apply(m, v) -> np.ndarray:
    """Matrix-vector product m @ v."""
    m = as_cmatrix(m)
    v = as_cvector(v)
    if m.shape[1] != v.shape[0]:
        raise DimensionMismatchError(f"apply: {m.shape} @ {v.shape}")
    return m @ v


def matmul(a, b) -> np.ndarray:
    """Matrix product a @ b."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"matmul: {a.shape} @ {b.shape}")
    return a @ b


def spectral_norm(m) -> float:
    """Largest singular value of m."""
    m = as_cmatrix(m)
    if m.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(m)[0])


def inverse(m) -> np.ndarray:
    """Inverse by partial-pivot LU, rejecting matrices singular to tolerance."""
    m = as_cmatrix(m)
    n, k = m.shape
    if n != k:
        raise DimensionMismatchError(f"inverse of non-square matrix {m.shape}")
    if n == 0:
        return m.copy()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    scale = spectral_norm(m)
    if np.min(np.abs(np.diag(lu))) < PIVOT_RTOL * max(scale, 1e-300):
        raise SingularMatrixError("matrix is singular to working tolerance")
    return scipy.linalg.lu_solve((lu, piv), np.eye(n, dtype=complex), check_finite=False)


def solve(m, rhs) -> np.ndarray:
    """Solve m @ x = rhs with the same pivot guard as :func:`inverse`."""
    m = as_cmatrix(m)
    rhs = as_cvector(rhs)
    if m.shape[0] != m.shape[1] or m.shape[1] != rhs.shape[0]:
        raise DimensionMismatchError(f"solve: {m.shape} vs {rhs.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < PIVOT_RTOL * max(spectral_norm(m), 1e-300):
        raise SingularMatrixError("matrix is singular to working tolerance")
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


# --- JSON encoding: a complex number is [re, im], a matrix a list of rows ---

def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def vector_to_json(v) -> list:
    return [complex_to_json(z) for z in as_cvector(v)]


def vector_from_json(data) -> np.ndarray:
    return as_cvector([complex_from_json(p) for p in data])


def matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in as_cmatrix(m)]


def matrix_from_json(data) -> np.ndarray:
    rows = [[complex_from_json(p) for p in row] for row in data]
    m = as_cmatrix(rows)
    return m
