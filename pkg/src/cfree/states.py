"""Vector states, moments, centering, and the alternating-word closed form.

Mixed moments are always evaluated by repeated matrix-vector application so
the truncation semantics match between formulas and oracles.  Random test
instances are self-adjoint, spectral norm 1, and fully determined by a
64-bit seed plus a trial index.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import numkernel as nk
from .embeddings import EmbeddedOperator, OperatorPair
from .errors import CenteringError, DepthOverflowError, DimensionMismatchError
from .spaces import H_SIDE, BasisWord, ProductBasis

CENTERING_TOL = 1e-12


def _as_matrix(op):
    if isinstance(op, EmbeddedOperator):
        return op.matrix
    if sp.issparse(op):
        return op
    return nk.as_cmatrix(op)


def _apply(op, v):
    return _as_matrix(op) @ v


def vector_state(op, v) -> complex:
    """<op v, v> for a unit vector v."""
    v = nk.as_cvector(v)
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"vector state needs a unit vector, norm was {nrm}")
    m = _as_matrix(op)
    if m.shape[1] != v.shape[0]:
        raise DimensionMismatchError(f"operator {m.shape} vs vector {v.shape}")
    return complex(np.vdot(v, m @ v))


def mixed_moment(ops, v) -> complex:
    """<ops[0] ops[1] ... ops[-1] v, v>, evaluated right to left.

    Lists longer than the basis depth only warn: the result is then the
    truncated value, not the exact moment.
    """
    v = nk.as_cvector(v)
    depth = None
    for op in ops:
        if isinstance(op, EmbeddedOperator):
            depth = op.basis.depth if depth is None else depth
            if op.basis.count != v.shape[0]:
                raise DimensionMismatchError("operator basis does not match the vector")
    if depth is not None and len(ops) > depth:
        warnings.warn(f"word of length {len(ops)} exceeds depth {depth}; "
                      "the moment is truncated, not exact", stacklevel=2)
    acc = v
    for op in reversed(list(ops)):
        acc = _apply(op, acc)
    return complex(np.vdot(v, acc))


def psi_value(pair: OperatorPair) -> complex:
    """Vacuum expectation of the K-side operator, <S eta, eta>."""
    return complex(pair.S[0, 0])


def phi_value(pair: OperatorPair) -> complex:
    """Vacuum expectation of the H-side operator, <T xi, xi>."""
    return complex(pair.T[0, 0])


def psi_center(pair: OperatorPair) -> OperatorPair:
    """Subtract the K-side vacuum expectation from both coordinates."""
    c = psi_value(pair)
    eye_t = np.eye(pair.T.shape[0], dtype=complex)
    eye_s = np.eye(pair.S.shape[0], dtype=complex)
    return OperatorPair(pair.index, pair.T - c * eye_t, pair.S - c * eye_s)


def _perp_column(m: np.ndarray, col: int) -> np.ndarray:
    """Reduced coordinates (rows 1..n-1) of m applied to basis vector e_col."""
    return np.asarray(m[1:, col], dtype=complex)


def alternating_word_vector(pairs, basis: ProductBasis) -> np.ndarray:
    """Closed form for Lambda_n ... Lambda_1 applied to the vacuum.

    ``pairs[0]`` is applied first.  Indices must alternate and every pair must
    be psi-centered.  The result is the telescoping sum of pure tensors built
    from the reduced parts of S eta and T xi together with scalar T-expectations,
    assembled without applying any embedded matrix.
    """
    pairs = list(pairs)
    n = len(pairs)
    if basis.side != H_SIDE:
        raise DimensionMismatchError("the closed form lives on the H side")
    if n == 0:
        return basis.vacuum_vector()
    if n > basis.depth:
        raise DepthOverflowError(f"word of length {n} exceeds depth {basis.depth}")
    for a, b in zip(pairs, pairs[1:]):
        if a.index == b.index:
            raise ValueError("indices must alternate")
    for p in pairs:
        if abs(psi_value(p)) > CENTERING_TOL:
            raise CenteringError(
                f"pair with index {p.index} has vacuum expectation {psi_value(p)}")

    phis = [phi_value(p) for p in pairs]
    out = np.zeros(basis.count, dtype=complex)

    # term j: prepended reduced S-letters for i = n..j+1, reduced T-terminal at j,
    # scalar product of phi-values below j; plus the pure vacuum term.
    for j in range(1, n + 1):
        scalar = complex(np.prod(phis[: j - 1])) if j > 1 else 1.0 + 0.0j
        if scalar == 0.0:
            continue
        term_pair = pairs[j - 1]
        t_coords = _perp_column(term_pair.T, 0)
        letter_coords = [(_perp_column(pairs[i - 1].S, 0), pairs[i - 1].index)
                         for i in range(n, j, -1)]
        slots = [range(1, len(c) + 1) for c, _ in letter_coords]
        term_slot = range(1, len(t_coords) + 1)
        for combo in itertools.product(*slots):
            coeff = scalar
            for (coords, _), c in zip(letter_coords, combo):
                coeff *= coords[c - 1]
            if coeff == 0.0:
                continue
            letters = tuple((idx, c) for (_, idx), c in zip(letter_coords, combo))
            for tc in term_slot:
                val = coeff * t_coords[tc - 1]
                if val == 0.0:
                    continue
                word = BasisWord(letters, (term_pair.index, tc))
                out[basis.index[word]] += val

    out[0] += complex(np.prod(phis))
    return out


@dataclass(frozen=True)
class MomentData:
    """phi and psi moment sequences of one element, orders 1..N."""

    order: int
    phi_moments: tuple
    psi_moments: tuple

    def __post_init__(self):
        if len(self.phi_moments) != self.order or len(self.psi_moments) != self.order:
            raise ValueError("moment lists must have length equal to the order")

    def to_json_obj(self) -> dict:
        return {
            "order": self.order,
            "phi": [nk.complex_to_json(m) for m in self.phi_moments],
            "psi": [nk.complex_to_json(m) for m in self.psi_moments],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["n", "re_m_phi", "im_m_phi", "re_m_psi", "im_m_psi"])
        for n in range(1, self.order + 1):
            mp = complex(self.phi_moments[n - 1])
            mq = complex(self.psi_moments[n - 1])
            writer.writerow([n, repr(mp.real), repr(mp.imag), repr(mq.real), repr(mq.imag)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _power_moments(op, v, order: int) -> list[complex]:
    out = []
    acc = v
    for _ in range(order):
        acc = _apply(op, acc)
        out.append(complex(np.vdot(v, acc)))
    return out


def moment_data(op, companion, order: int) -> MomentData:
    """Pair the phi-moments of an H-side operator at xi with the psi-moments of
    its K-side companion at eta."""
    if isinstance(op, EmbeddedOperator) and order > op.basis.depth:
        raise DepthOverflowError(f"order {order} exceeds H-side depth {op.basis.depth}")
    if isinstance(companion, EmbeddedOperator) and order > companion.basis.depth:
        raise DepthOverflowError(f"order {order} exceeds K-side depth "
                                 f"{companion.basis.depth}")
    xiv = op.basis.vacuum_vector() if isinstance(op, EmbeddedOperator) else None
    if xiv is None:
        m = _as_matrix(op)
        xiv = np.zeros(m.shape[0], dtype=complex)
        xiv[0] = 1.0
    etav = (companion.basis.vacuum_vector()
            if isinstance(companion, EmbeddedOperator) else None)
    if etav is None:
        m = _as_matrix(companion)
        etav = np.zeros(m.shape[0], dtype=complex)
        etav[0] = 1.0
    return MomentData(order,
                      tuple(_power_moments(op, xiv, order)),
                      tuple(_power_moments(companion, etav, order)))


def moments_of_matrix(m, order: int) -> tuple:
    """<m^n e0, e0> for n = 1..order (exact small-space moments)."""
    m = _as_matrix(m)
    v = np.zeros(m.shape[0], dtype=complex)
    v[0] = 1.0
    return tuple(_power_moments(m, v, order))


# --- seeded random instances -------------------------------------------------

def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Per-trial generator: (seed, trial) fully determines every draw."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                                        spawn_key=(int(trial),)))


def random_selfadjoint(rng: np.random.Generator, n: int) -> np.ndarray:
    """Self-adjoint with independent normal entries, scaled to spectral norm 1."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (a + a.conj().T) / 2.0
    nrm = nk.spectral_norm(h)
    if nrm == 0.0:
        h = np.eye(n, dtype=complex)
        nrm = 1.0
    return h / nrm


def random_pair(rng: np.random.Generator, iota: int, dim_h: int, dim_k: int) -> OperatorPair:
    return OperatorPair(iota, random_selfadjoint(rng, dim_h), random_selfadjoint(rng, dim_k))


def random_centered_pair(rng: np.random.Generator, iota: int, dim_h: int,
                         dim_k: int) -> OperatorPair:
    return psi_center(random_pair(rng, iota, dim_h, dim_k))
