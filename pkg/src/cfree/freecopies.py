"""The doubling construction: one pair of spaces realizes both states as
vector states, with the doubled copies simultaneously conditionally free and
free.

Starting from (H_a, K_a), the beta side is the direct double H_a + H_a,
K_a + K_a with the distinguished vectors in the first summand.  The vector
eta_perp = (0, eta_a) is a unit vector in the reduced part of K_beta, and
eta_tilde = eta_perp (x) h_a^o (a single-letter basis word) induces the second
state.  The alpha embedding keeps operators as they are; the beta embedding
doubles them blockwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import numkernel as nk
from .embeddings import EmbeddedOperator, OperatorPair, embed_cfree
from .errors import CenteringError, DepthOverflowError, DimensionMismatchError
from .spaces import (ALPHA, BETA, H_SIDE, BasisWord, PointedSpace, ProductBasis,
                     cached_product_basis)
from .states import _perp_column


def _double(m: np.ndarray) -> np.ndarray:
    return scipy.linalg.block_diag(m, m)


@dataclass
class FreeCopyContext:
    """Doubled construction data: spaces, H-side basis, and eta_tilde."""

    dim_h: int
    dim_k: int
    depth: int
    basis: ProductBasis
    eta_tilde_word: BasisWord
    eta_tilde_index: int

    @property
    def eta_tilde(self) -> np.ndarray:
        v = np.zeros(self.basis.count, dtype=complex)
        v[self.eta_tilde_index] = 1.0
        return v

    @property
    def xi(self) -> np.ndarray:
        return self.basis.vacuum_vector()

    def psi_of(self, x_S: np.ndarray) -> complex:
        """The second marginal state of an abstract element, <x_S eta_a, eta_a>."""
        return complex(nk.as_cmatrix(x_S)[0, 0])

    def to_json(self) -> dict:
        return {
            "dim_h": self.dim_h,
            "dim_k": self.dim_k,
            "depth": self.depth,
            "doubled_dims": [self.dim_h, self.dim_k, 2 * self.dim_h, 2 * self.dim_k],
            "basis_hash": self.basis.content_hash(),
            "eta_tilde_word": self.eta_tilde_word.to_json(),
            "eta_tilde_index": self.eta_tilde_index,
        }


def build_free_copy_context(h_alpha: PointedSpace, k_alpha: PointedSpace,
                            depth: int) -> FreeCopyContext:
    """Assemble the doubled c-free product at the given truncation depth.

    Requires dim H_alpha >= 2 so a unit vector h_a^o exists in the reduced
    part (that vector is pinned to the first reduced coordinate), and
    depth >= 1 so eta_tilde is inside the truncation.
    """
    if h_alpha.dim < 2:
        raise DimensionMismatchError("the doubling construction needs dim H_alpha >= 2")
    if depth < 1:
        raise DepthOverflowError("eta_tilde is a one-letter word; depth must be >= 1")
    basis = cached_product_basis(
        (h_alpha.dim, k_alpha.dim, 2 * h_alpha.dim, 2 * k_alpha.dim), depth, H_SIDE)
    # eta_perp = (0, eta_a) sits at coordinate dim_k of K_beta; h_a^o is e1.
    word = BasisWord(((BETA, k_alpha.dim),), (ALPHA, 1))
    return FreeCopyContext(
        dim_h=h_alpha.dim, dim_k=k_alpha.dim, depth=depth,
        basis=basis, eta_tilde_word=word, eta_tilde_index=basis.index[word],
    )


def doubled_pair(x_T: np.ndarray, x_S: np.ndarray, side: int,
                 ctx: FreeCopyContext) -> OperatorPair:
    """The operator pair embedding an abstract element on the chosen side."""
    x_T = nk.as_cmatrix(x_T)
    x_S = nk.as_cmatrix(x_S)
    if x_T.shape != (ctx.dim_h, ctx.dim_h) or x_S.shape != (ctx.dim_k, ctx.dim_k):
        raise DimensionMismatchError(
            f"element matrices must be {ctx.dim_h}x{ctx.dim_h} and "
            f"{ctx.dim_k}x{ctx.dim_k}")
    if side == ALPHA:
        return OperatorPair(ALPHA, x_T, x_S)
    return OperatorPair(BETA, _double(x_T), _double(x_S))


def rho(x_T: np.ndarray, x_S: np.ndarray, side: int,
        ctx: FreeCopyContext) -> EmbeddedOperator:
    """The representation of an abstract element on the doubled product space."""
    return embed_cfree(doubled_pair(x_T, x_S, side, ctx), ctx.basis)


def alternating_product_at_eta_tilde(elements, ctx: FreeCopyContext) -> np.ndarray:
    """Closed form for rho_b(y_r) rho_a(x_r) ... rho_b(y_1) rho_a(x_1) eta_tilde.

    ``elements`` lists the abstract (x_T, x_S) matrices in application order:
    alpha, beta, alpha, beta, ...; every element must be psi-centered.  The
    result is the single pure tensor of prepended reduced S-letters ending in
    eta_tilde, built without applying any embedded matrix.
    """
    elements = list(elements)
    if len(elements) % 2 != 0 or not elements:
        raise ValueError("need a nonempty alternating list alpha, beta, ..., beta")
    r = len(elements) // 2
    if 2 * r + 1 > ctx.depth:
        raise DepthOverflowError(
            f"product of length {2 * r} at eta_tilde needs depth >= {2 * r + 1}")

    pairs = []
    for pos, (x_T, x_S) in enumerate(elements):
        side = ALPHA if pos % 2 == 0 else BETA
        if abs(ctx.psi_of(x_S)) > 1e-12:
            raise CenteringError(f"element at position {pos} is not psi-centered")
        pairs.append(doubled_pair(x_T, x_S, side, ctx))

    # letters, leftmost first: reduced part of S eta for pairs 2r-1 (beta) down to 0
    letter_cols = [(_perp_column(p.S, 0), p.index) for p in reversed(pairs)]
    out = np.zeros(ctx.basis.count, dtype=complex)
    slots = [range(1, len(c) + 1) for c, _ in letter_cols]
    base_word = ctx.eta_tilde_word
    for combo in itertools.product(*slots):
        coeff = 1.0 + 0.0j
        for (coords, _), c in zip(letter_cols, combo):
            coeff *= coords[c - 1]
        if coeff == 0.0:
            continue
        letters = tuple((idx, c) for (_, idx), c in zip(letter_cols, combo)) \
            + base_word.letters
        out[ctx.basis.index[BasisWord(letters, base_word.terminal)]] += coeff
    return out
