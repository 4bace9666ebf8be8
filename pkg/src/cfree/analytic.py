"""Resolvent-based evaluation of the transform tower at complex points.

An element with two states is carried as two (operator, unit vector) legs:
the phi leg and the psi leg.  For the operator model the phi leg lives on the
truncated H-side space at the vacuum and the psi leg either on the K-side
free product at its vacuum (which realizes the pair as free for psi) or, for
the doubled construction, on the same H-side space at eta_tilde.  Moments up
to the truncation depth are exact, so resolvent values carry only the
geometric tail beyond the depth; all tolerances budget for that tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import numkernel as nk
from .embeddings import EmbeddedOperator, OperatorPair, embed_cfree, embed_free, \
    operator_norm
from .errors import DimensionMismatchError, DomainRadiusError, NewtonConvergenceError
from .freecopies import FreeCopyContext, rho
from .reports import CheckReport, make_report
from .spaces import ALPHA, BETA, H_SIDE, K_SIDE, cached_product_basis
from .states import vector_state

NEUMANN_RATIO = 0.6
RESOLVENT_GUARD = 0.99


def _e0(n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return v


def _matrix_of(op):
    if isinstance(op, EmbeddedOperator):
        return op.matrix
    if sp.issparse(op):
        return op.tocsr()
    return nk.as_cmatrix(op)


def resolvent_apply(op, v: np.ndarray, t: complex, norm: float | None = None) -> np.ndarray:
    """x = (1 - t op)^{-1} v.

    Dense solve for dense operators; for sparse ones a Neumann sum when
    |t| * norm is comfortably inside the disk, else a sparse LU solve.
    """
    m = _matrix_of(op)
    t = complex(t)
    if t == 0:
        return v.astype(complex)
    if not sp.issparse(m):
        return np.linalg.solve(np.eye(m.shape[0], dtype=complex) - t * m, v)
    ratio = abs(t) * norm if norm is not None else None
    if ratio is not None and ratio <= NEUMANN_RATIO:
        acc = v.astype(complex)
        term = acc
        floor = 1e-17 * max(1.0, float(np.linalg.norm(acc)))
        for _ in range(2000):
            term = t * (m @ term)
            acc = acc + term
            if np.linalg.norm(term) <= floor:
                return acc
        raise NewtonConvergenceError("Neumann resolvent sum failed to converge")
    eye = sp.identity(m.shape[0], dtype=complex, format="csc")
    return spla.splu((eye - t * m).tocsc()).solve(v.astype(complex))


@dataclass
class StateLeg:
    """One (operator, unit vector) half of a two-state element."""

    op: object
    vec: np.ndarray

    def __post_init__(self):
        self.vec = nk.as_cvector(self.vec)
        if abs(np.linalg.norm(self.vec) - 1.0) > 1e-12:
            raise ValueError("state vector must be a unit vector")
        if _matrix_of(self.op).shape[1] != self.vec.shape[0]:
            raise DimensionMismatchError("operator and state vector sizes differ")

    def expectation(self) -> complex:
        return vector_state(self.op, self.vec)

    def resolvent_state(self, t: complex, norm: float) -> complex:
        x = resolvent_apply(self.op, self.vec, t, norm)
        return complex(np.vdot(self.vec, x))

    def resolvent_pair(self, t: complex, norm: float) -> tuple[complex, complex]:
        """(h, h') at t: the resolvent state and its t-derivative
        <R a R v, v> with R = (1 - t a)^{-1}."""
        m = _matrix_of(self.op)
        x = resolvent_apply(self.op, self.vec, t, norm)
        y = resolvent_apply(self.op, m @ x, t, norm)
        return complex(np.vdot(self.vec, x)), complex(np.vdot(self.vec, y))


class TwoStateElement:
    """An element evaluated against two states.

    ``TwoStateElement(a, phi_vec, psi_vec)`` places both states on one carrier
    space; :meth:`two_sided` splits the legs across different spaces (the
    operator model evaluates phi on the H side and psi on the K side).
    """

    def __init__(self, a, phi_vec, psi_vec, norm: float | None = None):
        self.phi = StateLeg(a, phi_vec)
        self.psi = StateLeg(a, psi_vec)
        self._norm = norm

    @classmethod
    def two_sided(cls, phi_op, phi_vec, psi_op, psi_vec, norm=None):
        obj = cls.__new__(cls)
        obj.phi = StateLeg(phi_op, phi_vec)
        obj.psi = StateLeg(psi_op, psi_vec)
        obj._norm = norm
        return obj

    @property
    def norm(self) -> float:
        if self._norm is None:
            self._norm = max(operator_norm(_matrix_of(self.phi.op)),
                             operator_norm(_matrix_of(self.psi.op)))
        return self._norm

    def phi_of_element(self) -> complex:
        return self.phi.expectation()

    def _guard(self, t: complex):
        if self.norm > 0 and abs(t) >= RESOLVENT_GUARD / self.norm:
            raise DomainRadiusError(
                f"|t| = {abs(t)} outside the guarded disk of radius "
                f"{RESOLVENT_GUARD / self.norm}")


def h(elem: TwoStateElement, t: complex) -> complex:
    """psi((1 - t a)^{-1})."""
    elem._guard(t)
    return elem.psi.resolvent_state(t, elem.norm)


def h_tilde(elem: TwoStateElement, t: complex) -> complex:
    """phi((1 - t a)^{-1})."""
    elem._guard(t)
    return elem.phi.resolvent_state(t, elem.norm)


def k(elem: TwoStateElement, t: complex) -> complex:
    return complex(t) * h(elem, t)


def k_tilde(elem: TwoStateElement, t: complex) -> complex:
    return complex(t) * h_tilde(elem, t)


def k_inverse_numeric(elem: TwoStateElement, z: complex, which: str = "k",
                      rtol: float = 1e-12, max_iter: int = 100) -> complex:
    """Newton solve of k(t) = z (or ktilde) seeded at t = z.

    The derivative comes from the resolvent identity
    d/dt psi((1-ta)^{-1}) = psi((1-ta)^{-1} a (1-ta)^{-1}); a halving damper
    engages when the residual fails to decrease near the disk edge.
    """
    if which not in ("k", "ktilde"):
        raise ValueError("which must be 'k' or 'ktilde'")
    leg = elem.psi if which == "k" else elem.phi
    z = complex(z)
    if z == 0:
        return 0.0 + 0.0j
    t = z
    resid_prev = np.inf
    target = rtol * (1.0 + abs(z))
    for _ in range(max_iter):
        elem._guard(t)
        hv, hd = leg.resolvent_pair(t, elem.norm)
        kv = t * hv
        resid = abs(kv - z)
        if resid <= target:
            return t
        kd = hv + t * hd
        if kd == 0:
            raise NewtonConvergenceError("vanishing derivative in Newton iteration")
        step = (kv - z) / kd
        if resid >= resid_prev:
            step *= 0.5
        t = t - step
        resid_prev = resid
    raise NewtonConvergenceError(
        f"no convergence to k(t) = {z} in {max_iter} iterations (domain violation?)")


def cfree_r_at(elem: TwoStateElement, z: complex) -> complex:
    """The two-state R-transform at a point, with the continuous extension
    R(0) = phi(a) for |z| below 1e-8."""
    z = complex(z)
    if abs(z) <= 1e-8:
        return elem.phi_of_element()
    t = k_inverse_numeric(elem, z, "k")
    return 1.0 / t - 1.0 / k_tilde(elem, t)


# --- realizations of c-free pairs -------------------------------------------

@dataclass
class CFreeRealization:
    """Operator model of a c-free pair: phi on the H side at the vacuum, psi on
    the K side at its vacuum (making the pair free for psi as well)."""

    pair_a: OperatorPair
    pair_b: OperatorPair
    h_basis: object
    k_basis: object
    lam_a: EmbeddedOperator
    lam_b: EmbeddedOperator
    lam_sa: EmbeddedOperator
    lam_sb: EmbeddedOperator

    @property
    def xi(self) -> np.ndarray:
        return self.h_basis.vacuum_vector()

    @property
    def eta(self) -> np.ndarray:
        return self.k_basis.vacuum_vector()

    def element(self, which: str) -> TwoStateElement:
        """A single element keeps its psi leg on the small K_iota space where
        functional calculus is exact; the sum needs the joint K-side space."""
        if which == "a":
            pair = self.pair_a
            return TwoStateElement.two_sided(
                self.lam_a, self.xi, pair.S, _e0(pair.S.shape[0]),
                norm=max(nk.spectral_norm(pair.T), nk.spectral_norm(pair.S)))
        if which == "b":
            pair = self.pair_b
            return TwoStateElement.two_sided(
                self.lam_b, self.xi, pair.S, _e0(pair.S.shape[0]),
                norm=max(nk.spectral_norm(pair.T), nk.spectral_norm(pair.S)))
        if which == "sum":
            phi_op = self.lam_a + self.lam_b
            psi_op = self.lam_sa + self.lam_sb
            norm = max(operator_norm(phi_op.matrix), operator_norm(psi_op.matrix))
            return TwoStateElement.two_sided(phi_op, self.xi, psi_op, self.eta,
                                             norm=norm)
        raise ValueError("which must be 'a', 'b' or 'sum'")


def realize_cfree_pair(pair_a: OperatorPair, pair_b: OperatorPair,
                       depth: int) -> CFreeRealization:
    """Embed two operator pairs on the truncated product spaces."""
    if pair_a.index != ALPHA or pair_b.index != BETA:
        raise DimensionMismatchError("pair_a must carry index alpha, pair_b beta")
    dims = (pair_a.T.shape[0], pair_a.S.shape[0], pair_b.T.shape[0], pair_b.S.shape[0])
    h_basis = cached_product_basis(dims, depth, H_SIDE)
    k_basis = cached_product_basis(dims, depth, K_SIDE)
    return CFreeRealization(
        pair_a=pair_a, pair_b=pair_b, h_basis=h_basis, k_basis=k_basis,
        lam_a=embed_cfree(pair_a, h_basis), lam_b=embed_cfree(pair_b, h_basis),
        lam_sa=embed_free(pair_a.S, ALPHA, k_basis),
        lam_sb=embed_free(pair_b.S, BETA, k_basis),
    )


def realize_free_copies(x_mats, y_mats, ctx: FreeCopyContext) -> dict:
    """Single-space two-state elements from the doubled construction: both
    vector states (at the vacuum and at eta_tilde) live on one H-side space."""
    x_T, x_S = x_mats
    y_T, y_S = y_mats
    a = rho(x_T, x_S, ALPHA, ctx)
    b = rho(y_T, y_S, BETA, ctx)
    xi = ctx.xi
    et = ctx.eta_tilde
    norm_a = max(nk.spectral_norm(x_T), nk.spectral_norm(x_S))
    norm_b = max(nk.spectral_norm(y_T), nk.spectral_norm(y_S))
    s = a + b
    norm_s = operator_norm(s.matrix)
    return {
        "a": TwoStateElement(a, xi, et, norm=norm_a),
        "b": TwoStateElement(b, xi, et, norm=norm_b),
        "sum": TwoStateElement(s, xi, et, norm=norm_s),
    }


# --- the centered-resolvent, h-tilde-of-a-sum and linearization checks ------

def _centered_resolvent_coeffs(rho_c, t1, t2, ha, hb):
    c0 = 1.0 - rho_c * (ha - 1.0) * (hb - 1.0)
    c1 = -t1 * (1.0 + rho_c * ha - rho_c * ha * hb)
    c2 = -t2 * (1.0 + rho_c * hb - rho_c * ha * hb)
    c3 = t1 * t2 * (1.0 - rho_c * ha * hb)
    return c0, c1, c2, c3


def check_centered_resolvent_identity(elem_a: TwoStateElement, elem_b: TwoStateElement,
                                      t1: complex, t2: complex, rho_c: complex,
                                      tol: float = 1e-9) -> CheckReport:
    """phi of the inverse of c0 + c1 a + c2 b + c3 ab against its closed form.

    Both elements must share the phi leg carrier space.  The scalar resolvent
    values h, htilde enter exactly; the left side is one exact matrix solve on
    the joint space.  Also verifies that the centered resolvents are
    psi-centered (reported in the context).
    """
    A = _matrix_of(elem_a.phi.op)
    B = _matrix_of(elem_b.phi.op)
    if A.shape != B.shape:
        raise DimensionMismatchError("elements do not share a phi-leg space")
    t1, t2, rho_c = complex(t1), complex(t2), complex(rho_c)
    ha = h(elem_a, t1)
    hb = h(elem_b, t2)
    hta = h_tilde(elem_a, t1)
    htb = h_tilde(elem_b, t2)

    # psi-centering of a(t1), b(t2) (part 1): exact by construction of h
    cent_a = abs(elem_a.psi.resolvent_state(t1, elem_a.norm) - ha)
    cent_b = abs(elem_b.psi.resolvent_state(t2, elem_b.norm) - hb)

    c0, c1, c2, c3 = _centered_resolvent_coeffs(rho_c, t1, t2, ha, hb)
    phivec = elem_a.phi.vec
    n = A.shape[0]
    if sp.issparse(A):
        eye = sp.identity(n, dtype=complex, format="csc")
        m = (c0 * eye + c1 * A + c2 * B + c3 * (A @ B)).tocsc()
        x = spla.splu(m).solve(phivec.astype(complex))
    else:
        eye = np.eye(n, dtype=complex)
        x = np.linalg.solve(c0 * eye + c1 * A + c2 * B + c3 * (A @ B), phivec)
    lhs = complex(np.vdot(phivec, x))
    denom = 1.0 - rho_c * (hta - ha) * (htb - hb)
    rhs = hta * htb / denom

    # part (2): the factored product equals c0 + c1 a + c2 b + c3 ab as
    # operators; probed on a deterministic spread vector
    probe = np.ones(n, dtype=complex) / np.sqrt(n)
    norm_a, norm_b = elem_a.norm, elem_b.norm
    w = probe - t2 * (B @ probe)
    bw = resolvent_apply(B, w, t2, norm_b) - hb * w          # b(t2) w
    abw = resolvent_apply(A, bw, t1, norm_a) - ha * bw       # a(t1) b(t2) w
    factored = w - rho_c * abw
    factored = factored - t1 * (A @ factored)
    direct = c0 * probe + c1 * (A @ probe) + c2 * (B @ probe) + c3 * (A @ (B @ probe))
    coeff_resid = float(np.max(np.abs(factored - direct)))

    return make_report(
        "centered-resolvent-identity", lhs, rhs, tol,
        scale=max(1.0, abs(lhs), abs(rhs)),
        context={"t1": [t1.real, t1.imag], "t2": [t2.real, t2.imag],
                 "rho": [rho_c.real, rho_c.imag],
                 "psi_centering_a": cent_a, "psi_centering_b": cent_b,
                 "coefficient_identity_resid": coeff_resid})


def check_htilde_sum_identity(elem_a: TwoStateElement, elem_b: TwoStateElement,
                              t1: complex, t2: complex | None = None,
                              tol: float = 1e-9) -> CheckReport:
    """The h-tilde of a sum identity under the coupling t1 h_a(t1) = t2 h_b(t2).

    When t2 is omitted it is solved from the coupling by Newton.  Verifies the
    nonvanishing guards, that the combined point t lies inside 1/|a+b|, and
    compares both sides through exact resolvent evaluations.
    """
    t1 = complex(t1)
    if t2 is None:
        z = k(elem_a, t1)
        t2 = k_inverse_numeric(elem_b, z, "k", rtol=1e-14)
    t2 = complex(t2)
    ha = h(elem_a, t1)
    hb = h(elem_b, t2)
    hyp = abs(t1 * ha - t2 * hb)
    if hyp > 1e-12 * max(1.0, abs(t1 * ha)):
        raise DomainRadiusError(f"coupling hypothesis violated by {hyp}")
    for name, val in (("h_a", ha), ("h_b", hb), ("h_a+h_b-1", ha + hb - 1.0)):
        if abs(val) <= 1e-10:
            raise DomainRadiusError(f"degenerate denominator: |{name}| = {abs(val)}")
    t = t1 * ha / (ha + hb - 1.0)

    A = _matrix_of(elem_a.phi.op)
    B = _matrix_of(elem_b.phi.op)
    if A.shape != B.shape:
        raise DimensionMismatchError("elements do not share a phi-leg space")
    sum_op = A + B
    norm_sum = operator_norm(sum_op)
    inside = norm_sum == 0.0 or abs(t) < 1.0 / norm_sum

    phivec = elem_a.phi.vec
    x = resolvent_apply(sum_op, phivec, t, norm_sum)
    lhs = complex(np.vdot(phivec, x))
    hta = h_tilde(elem_a, t1)
    htb = h_tilde(elem_b, t2)
    rhs = (ha + hb - 1.0) * hta * htb / (ha * htb + hb * hta - hta * htb)
    return make_report(
        "htilde-sum-identity", lhs, rhs, tol,
        scale=max(1.0, abs(lhs), abs(rhs)),
        context={"t1": [t1.real, t1.imag], "t2": [t2.real, t2.imag],
                 "t": [t.real, t.imag], "hypothesis_residual": hyp,
                 "t_inside_radius": bool(inside)})


def check_linearization_analytic(elem_a: TwoStateElement, elem_b: TwoStateElement,
                                 elem_sum: TwoStateElement, z: complex,
                                 tol: float = 1e-8,
                                 t_tol: float = 1e-9) -> list[CheckReport]:
    """Pointwise linearization at z: the three-term reciprocal identity in the
    inverse points t1, t2, t3, plus the psi-free step t == t3.

    Returns two reports: the identity residual and |t - t3| (the latter holds
    because the realization is free for psi; for merely c-free pairs no claim
    is made)."""
    z = complex(z)
    t1 = k_inverse_numeric(elem_a, z, "k")
    t2 = k_inverse_numeric(elem_b, z, "k")
    t3 = k_inverse_numeric(elem_sum, z, "k")
    ha = h(elem_a, t1)
    hb = h(elem_b, t2)
    ht_sum = h_tilde(elem_sum, t3)
    hta = h_tilde(elem_a, t1)
    htb = h_tilde(elem_b, t2)
    lhs = (1.0 / t3) * (1.0 - 1.0 / ht_sum)
    rhs = (1.0 / t1) * (1.0 - 1.0 / hta) + (1.0 / t2) * (1.0 - 1.0 / htb)
    t = t1 * ha / (ha + hb - 1.0)
    identity = make_report(
        "linearization-analytic", lhs, rhs, tol,
        scale=max(1.0, abs(lhs), abs(rhs)),
        context={"z": [z.real, z.imag], "t1": [t1.real, t1.imag],
                 "t2": [t2.real, t2.imag], "t3": [t3.real, t3.imag],
                 "t": [t.real, t.imag]})
    t_step = make_report(
        "psi-free-step-t-equals-t3", t, t3, t_tol,
        scale=max(1.0, abs(t3)),
        context={"z": [z.real, z.imag]})
    return [identity, t_step]
