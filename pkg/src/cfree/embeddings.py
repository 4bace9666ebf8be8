"""Embedded operators on the truncated product spaces.

The central constructor is :func:`embed_cfree`, mapping a pair (T, S) acting
on (H_iota, K_iota) to the big operator that acts as T on the vacuum-plus-own-
terminal block and as copies of S on every K-letter block.  The free product
left regular representation lives on the K side (:func:`embed_free`), and the
Boolean, monotone and orthogonal embeddings are built directly from their
defining isometries for cross-validation against the degenerate cases.

Embedded operators are compressions to the truncated basis: components whose
letter count would exceed the depth are dropped, so moments of order up to
the depth are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import numkernel as nk
from .errors import DimensionMismatchError
from .reports import CheckReport
from .spaces import ALPHA, BETA, H_SIDE, K_SIDE, BasisWord, ProductBasis


@dataclass(frozen=True)
class OperatorPair:
    """A pair (T, S) acting on (H_iota, K_iota)."""

    index: int
    T: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "T", nk.as_cmatrix(self.T))
        object.__setattr__(self, "S", nk.as_cmatrix(self.S))
        for name in ("T", "S"):
            m = getattr(self, name)
            if m.shape[0] != m.shape[1]:
                raise DimensionMismatchError(f"{name} must be square, got {m.shape}")

    def adjoint(self) -> "OperatorPair":
        return OperatorPair(self.index, self.T.conj().T, self.S.conj().T)

    def compose(self, first: "OperatorPair") -> "OperatorPair":
        """The pair of self @ first (products in both slots)."""
        if self.index != first.index:
            raise DimensionMismatchError("cannot compose pairs with different indices")
        return OperatorPair(self.index, self.T @ first.T, self.S @ first.S)


class EmbeddedOperator:
    """A sparse operator on a ProductBasis, materializable as a dense matrix."""

    def __init__(self, basis: ProductBasis, matrix, provenance: str = ""):
        self.basis = basis
        self.matrix = sp.csr_matrix(matrix, dtype=complex)
        if self.matrix.shape != (basis.count, basis.count):
            raise DimensionMismatchError(
                f"matrix shape {self.matrix.shape} does not match basis count {basis.count}")
        self.provenance = provenance

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def adjoint(self) -> "EmbeddedOperator":
        return EmbeddedOperator(self.basis, self.matrix.conj().T.tocsr(),
                                f"adjoint({self.provenance})")

    def norm(self) -> float:
        return operator_norm(self.matrix)

    def _check_same_basis(self, oth):
        if self.basis is not oth.basis and self.basis.words != oth.basis.words:
            raise DimensionMismatchError("operators live on different bases")

    def __add__(self, oth: "EmbeddedOperator") -> "EmbeddedOperator":
        self._check_same_basis(oth)
        return EmbeddedOperator(self.basis, self.matrix + oth.matrix,
                                f"({self.provenance})+({oth.provenance})")

    def __sub__(self, oth: "EmbeddedOperator") -> "EmbeddedOperator":
        self._check_same_basis(oth)
        return EmbeddedOperator(self.basis, self.matrix - oth.matrix,
                                f"({self.provenance})-({oth.provenance})")

    def __rmul__(self, scalar) -> "EmbeddedOperator":
        return EmbeddedOperator(self.basis, complex(scalar) * self.matrix,
                                f"{scalar}*({self.provenance})")

    def __matmul__(self, oth: "EmbeddedOperator") -> "EmbeddedOperator":
        self._check_same_basis(oth)
        return EmbeddedOperator(self.basis, (self.matrix @ oth.matrix).tocsr(),
                                f"({self.provenance})@({oth.provenance})")

    def minus_scalar(self, c) -> "EmbeddedOperator":
        """self - c * identity."""
        eye = sp.identity(self.basis.count, dtype=complex, format="csr")
        return EmbeddedOperator(self.basis, self.matrix - complex(c) * eye,
                                f"({self.provenance})-{c}*I")

    def to_json(self) -> dict:
        return {
            "basis_hash": self.basis.content_hash(),
            "provenance": self.provenance,
            "matrix": nk.matrix_to_json(self.dense()),
        }


def identity_operator(basis: ProductBasis) -> EmbeddedOperator:
    return EmbeddedOperator(basis, sp.identity(basis.count, dtype=complex, format="csr"),
                            "identity")


def operator_norm(matrix) -> float:
    """Spectral norm of a dense or sparse matrix."""
    if sp.issparse(matrix):
        n = matrix.shape[0]
        if n <= 400:
            return nk.spectral_norm(matrix.toarray())
        try:
            s = spla.svds(matrix.astype(complex), k=1, return_singular_vectors=False,
                          maxiter=10 * n, tol=1e-10)
            return float(s[0])
        except Exception:
            return _power_norm(matrix)
    return nk.spectral_norm(matrix)


def _power_norm(matrix, iters=200, tol=1e-12) -> float:
    rng = np.random.default_rng(12345)
    n = matrix.shape[0]
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    prev = 0.0
    mh = matrix.conj().T
    for _ in range(iters):
        w = mh @ (matrix @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        est = float(np.sqrt(norm))
        if abs(est - prev) <= tol * max(1.0, est):
            return est
        prev = est
    return prev


def _coo_parts(basis, iota, T, S, include_home: bool):
    """Rows/cols/vals of the scalar-plus-prepend and strip actions, plus the
    T-block on the vacuum/home words when requested."""
    rows, cols, vals = [], [], []
    kdim = S.shape[0]

    if include_home:
        home = basis.home_indices(iota)
        rr, cc = np.meshgrid(home, home, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(np.asarray(T, dtype=complex).ravel())

    pcols = basis.prepend_cols(iota)
    if pcols.size:
        rows.append(pcols)
        cols.append(pcols)
        vals.append(np.full(pcols.size, S[0, 0], dtype=complex))
        prep = basis.prepend_table(iota)
        for c in range(1, kdim):
            tgt = prep[c, pcols]
            mask = tgt >= 0
            if mask.any():
                rows.append(tgt[mask])
                cols.append(pcols[mask])
                vals.append(np.full(int(mask.sum()), S[c, 0], dtype=complex))

    scols = basis.strip_cols(iota)
    if scols.size:
        _, fl_c, strip_tgt = basis.strip_data()
        coords = fl_c[scols]
        tgts = strip_tgt[scols]
        rows.append(tgts)
        cols.append(scols)
        vals.append(np.asarray(S[0, coords], dtype=complex).ravel())
        prep = basis.prepend_table(iota)
        for c2 in range(1, kdim):
            rows.append(prep[c2, tgts])
            cols.append(scols)
            vals.append(np.asarray(S[c2, coords], dtype=complex).ravel())

    if not rows:
        return (np.empty(0, dtype=np.int64),) * 2 + (np.empty(0, dtype=complex),)
    return (np.concatenate(rows), np.concatenate(cols),
            np.concatenate(vals).astype(complex))


def _assemble(basis, rows, cols, vals, provenance):
    n = basis.count
    m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex).tocsr()
    m.eliminate_zeros()
    return EmbeddedOperator(basis, m, provenance)


def embed_cfree(pair: OperatorPair, basis: ProductBasis) -> EmbeddedOperator:
    """The block operator of (T, S) with index iota on the H-side basis."""
    if basis.side != H_SIDE:
        raise DimensionMismatchError("embed_cfree needs an H-side basis")
    iota = pair.index
    if pair.T.shape[0] != basis.h_dims[iota] or pair.S.shape[0] != basis.k_dims[iota]:
        raise DimensionMismatchError(
            f"pair dims {pair.T.shape[0]}x{pair.S.shape[0]} do not match basis "
            f"H={basis.h_dims[iota]}, K={basis.k_dims[iota]} for index {iota}")
    rows, cols, vals = _coo_parts(basis, iota, pair.T, pair.S, include_home=True)
    return _assemble(basis, rows, cols, vals, f"cfree[{'ab'[iota]}]")


def embed_free(S, iota: int, basis: ProductBasis) -> EmbeddedOperator:
    """Left regular representation of S on the truncated free product (K side)."""
    S = nk.as_cmatrix(S)
    if basis.side != K_SIDE:
        raise DimensionMismatchError("embed_free needs a K-side basis")
    if S.shape[0] != S.shape[1] or S.shape[0] != basis.k_dims[iota]:
        raise DimensionMismatchError(
            f"S shape {S.shape} does not match K dim {basis.k_dims[iota]}")
    rows, cols, vals = _coo_parts(basis, iota, None, S, include_home=False)
    return _assemble(basis, rows, cols, vals, f"free[{'ab'[iota]}]")


# --- direct constructions of the classical embeddings -----------------------

def _require_degenerate(basis, k_alpha=None, k_beta=None, h_beta=None, what=""):
    ka, kb = basis.k_dims
    hb = basis.h_dims[1]
    if k_alpha is not None and ka != k_alpha:
        raise DimensionMismatchError(f"{what} needs dim K_alpha == {k_alpha}, got {ka}")
    if k_beta is not None and kb != k_beta:
        raise DimensionMismatchError(f"{what} needs dim K_beta == {k_beta}, got {kb}")
    if h_beta is not None and hb != h_beta:
        raise DimensionMismatchError(f"{what} needs dim H_beta == {h_beta}, got {hb}")


def _v_compression(basis, iota: int) -> np.ndarray:
    """The coisometry V_iota: big space -> H_iota (vacuum to the distinguished
    vector, own bare terminals to reduced coordinates, everything else to 0)."""
    hdim = basis.h_dims[iota]
    V = np.zeros((hdim, basis.count), dtype=complex)
    V[0, 0] = 1.0
    for c in range(1, hdim):
        V[c, basis.index[BasisWord((), (iota, c))]] = 1.0
    return V


def embed_boolean(T, iota: int, basis: ProductBasis) -> EmbeddedOperator:
    """Boolean embedding V* T V on the degenerate basis with trivial K spaces."""
    T = nk.as_cmatrix(T)
    if basis.side != H_SIDE:
        raise DimensionMismatchError("embed_boolean needs an H-side basis")
    _require_degenerate(basis, k_alpha=1, k_beta=1, what="embed_boolean")
    if T.shape[0] != basis.h_dims[iota]:
        raise DimensionMismatchError(f"T shape {T.shape} vs H dim {basis.h_dims[iota]}")
    V = _v_compression(basis, iota)
    return EmbeddedOperator(basis, sp.csr_matrix(V.conj().T @ T @ V),
                            f"boolean[{'ab'[iota]}]")


def embed_monotone(T, iota: int, basis: ProductBasis) -> EmbeddedOperator:
    """Monotone embedding (ordering alpha < beta) on the degenerate basis with
    K_alpha trivial and H_beta identified with K_beta."""
    T = nk.as_cmatrix(T)
    if basis.side != H_SIDE:
        raise DimensionMismatchError("embed_monotone needs an H-side basis")
    _require_degenerate(basis, k_alpha=1, what="embed_monotone")
    if basis.h_dims[1] != basis.k_dims[1]:
        raise DimensionMismatchError("embed_monotone needs dim H_beta == dim K_beta")
    if T.shape[0] != basis.h_dims[iota]:
        raise DimensionMismatchError(f"T shape {T.shape} vs H dim {basis.h_dims[iota]}")
    if iota == ALPHA:
        V = _v_compression(basis, ALPHA)
        mat = V.conj().T @ T @ V
        return EmbeddedOperator(basis, sp.csr_matrix(mat), "monotone[a]")

    # beta side: V* T V plus the tensor action on (C xi_b + H_b^o) x H_a^o
    nb = basis.h_dims[1]
    na_red = basis.h_dims[0] - 1
    V = _v_compression(basis, BETA)
    mat = V.conj().T @ T @ V
    if na_red > 0:
        V0 = np.zeros((nb * na_red, basis.count), dtype=complex)
        for j, ca in enumerate(range(1, na_red + 1)):
            V0[0 * na_red + j, basis.index[BasisWord((), (ALPHA, ca))]] = 1.0
            for cb in range(1, nb):
                V0[cb * na_red + j,
                   basis.index[BasisWord(((BETA, cb),), (ALPHA, ca))]] = 1.0
        big = np.kron(T, np.eye(na_red, dtype=complex))
        mat = mat + V0.conj().T @ big @ V0
    return EmbeddedOperator(basis, sp.csr_matrix(mat), "monotone[b]")


def embed_orthogonal(T, role: int, basis: ProductBasis) -> EmbeddedOperator:
    """Orthogonal embeddings via the isometry U into H_alpha (x) K_beta, on the
    degenerate basis with K_alpha and H_beta trivial.  ``role`` ALPHA embeds an
    operator on H_alpha, BETA one on K_beta."""
    T = nk.as_cmatrix(T)
    if basis.side != H_SIDE:
        raise DimensionMismatchError("embed_orthogonal needs an H-side basis")
    _require_degenerate(basis, k_alpha=1, h_beta=1, what="embed_orthogonal")
    na = basis.h_dims[0]
    nk_b = basis.k_dims[1]
    expected = na if role == ALPHA else nk_b
    if T.shape[0] != expected:
        raise DimensionMismatchError(f"operator shape {T.shape} vs dim {expected}")

    # U: vacuum -> e0 (x) e0, bare alpha terminal c -> e_c (x) e0,
    #    (beta, ck) + terminal (alpha, ca) -> e_ca (x) e_ck
    U = np.zeros((na * nk_b, basis.count), dtype=complex)
    U[0, 0] = 1.0
    for ca in range(1, na):
        U[ca * nk_b + 0, basis.index[BasisWord((), (ALPHA, ca))]] = 1.0
        for ck in range(1, nk_b):
            U[ca * nk_b + ck, basis.index[BasisWord(((BETA, ck),), (ALPHA, ca))]] = 1.0

    if role == ALPHA:
        proj = np.zeros((nk_b, nk_b), dtype=complex)
        proj[0, 0] = 1.0
        big = np.kron(T, proj)
        name = "orthogonal[a]"
    else:
        perp = np.eye(na, dtype=complex)
        perp[0, 0] = 0.0
        big = np.kron(perp, T)
        name = "orthogonal[b]"
    return EmbeddedOperator(basis, sp.csr_matrix(U.conj().T @ big @ U), name)


def adjoint_compatibility_check(pair: OperatorPair, basis: ProductBasis,
                                second: OperatorPair | None = None,
                                tolerance: float = 1e-12) -> CheckReport:
    """Adjoint transfer and restricted multiplicativity of the embedding.

    Compares the conjugate transpose of the embedded (T, S) with the embedding
    of (T*, S*), and the embedding of a product pair with the product of the
    embeddings on the subspace of words with letter count <= depth-1 (the top
    layer is cut by the truncation).
    """
    second = second or pair
    a = embed_cfree(pair, basis)
    adj_direct = a.matrix.conj().T.tocsr()
    adj_embed = embed_cfree(pair.adjoint(), basis).matrix
    diff = (adj_direct - adj_embed).tocoo()
    adj_err = float(np.max(np.abs(diff.data))) if diff.nnz else 0.0

    b = embed_cfree(second, basis)
    prod_embed = embed_cfree(second.compose(pair), basis).matrix
    prod_direct = (b.matrix @ a.matrix).tocsr()
    counts = np.fromiter((w.letter_count for w in basis.words), dtype=np.int64,
                         count=basis.count)
    keep = np.nonzero(counts <= basis.depth - 1)[0]
    dd = (prod_embed[:, keep] - prod_direct[:, keep]).tocoo()
    mult_err = float(np.max(np.abs(dd.data))) if dd.nnz else 0.0

    worst = max(adj_err, mult_err)
    return CheckReport(
        name="lambda-adjoint-and-multiplicativity",
        lhs=complex(worst), rhs=0.0,
        abs_err=worst, rel_err=worst,
        tolerance=tolerance, passed=worst <= tolerance,
        context={"adjoint_err": adj_err, "restricted_mult_err": mult_err,
                 "depth": basis.depth},
    )
