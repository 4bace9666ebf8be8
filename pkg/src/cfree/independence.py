"""Numerical checkers for the five independence notions on concrete families.

Each checker enumerates alternating words exhaustively up to a maximum length
(families at desk scale keep this cheap), evaluates both sides of the defining
identity by repeated matrix-vector application, and emits one CheckReport per
word.  Relative errors are normalized by the product of (1 + operator norm)
over the word, since factorization identities scale multiplicatively.
"""

from __future__ import annotations

import numpy as np

from .embeddings import EmbeddedOperator, operator_norm
from .reports import CheckReport, make_report
from .spaces import ALPHA, BETA, other
from .states import _apply, _as_matrix, vector_state

__all__ = [
    "CheckReport",
    "check_cfree",
    "check_free",
    "check_boolean",
    "check_monotone",
    "check_orthogonal",
]


def _centered(ops, vec):
    """Operators minus their vector state at vec, with cached norms."""
    out = []
    for op in ops:
        c = vector_state(op, vec)
        shifted = op.minus_scalar(c) if isinstance(op, EmbeddedOperator) else \
            _as_matrix(op) - c * np.eye(_as_matrix(op).shape[0], dtype=complex)
        out.append((shifted, operator_norm(_as_matrix(shifted))))
    return out


def _word_name(kind, labels, members):
    body = ",".join(f"{'ab'[l]}{m}" for l, m in zip(labels, members))
    return f"{kind}[{body}]"


def _check_families(kind, families, state_vec, tol, max_len, expect,
                    phi_vec=None):
    """DFS over alternating words; at each node of length >= 2 compare the
    state of the word against the expected value.

    expect = 'product' compares against the product of singleton states
    (conditional factorization); expect = 'zero' against zero (freeness).
    State values and word vectors are taken at phi_vec (defaults to state_vec).
    """
    phi_vec = state_vec if phi_vec is None else phi_vec
    reports = []
    phis = [[vector_state(op, phi_vec) for op, _ in fam] for fam in families]

    def dfs(label, member, vec, prod, norm_scale, labels, members, length):
        op, nrm = families[label][member]
        new_vec = _apply(op, vec)
        new_prod = prod * phis[label][member]
        new_scale = norm_scale * (1.0 + nrm)
        new_labels = labels + (label,)
        new_members = members + (member,)
        if length >= 2:
            lhs = complex(np.vdot(phi_vec, new_vec))
            rhs = new_prod if expect == "product" else 0.0
            reports.append(make_report(
                _word_name(kind, new_labels[::-1], new_members[::-1]),
                lhs, rhs, tol, scale=new_scale,
                context={"length": length}))
        if length < max_len:
            nxt = other(label)
            for m in range(len(families[nxt])):
                dfs(nxt, m, new_vec, new_prod, new_scale,
                    new_labels, new_members, length + 1)

    for start in (ALPHA, BETA):
        for m in range(len(families[start])):
            dfs(start, m, phi_vec, 1.0 + 0.0j, 1.0, (), (), 1)
    return reports


def check_cfree(families, xi_vec, psi_vec=None, max_len=6, tol=1e-9,
                psi_values=None) -> list[CheckReport]:
    """Conditional freeness: psi-centered alternating words factorize under phi.

    Centering is against the vector state at ``psi_vec``; alternatively pass
    ``psi_values`` (two lists of complex) for marginal centering when no joint
    psi-vector exists on the carrier space.
    """
    if (psi_vec is None) == (psi_values is None):
        raise ValueError("supply exactly one of psi_vec or psi_values")
    cent = []
    for side, fam in enumerate(families):
        if psi_vec is not None:
            cent.append(_centered(fam, psi_vec))
        else:
            shifted = [op.minus_scalar(c) for op, c in zip(fam, psi_values[side])]
            cent.append([(op, operator_norm(op.matrix)) for op in shifted])
    return _check_families("cfree", cent, psi_vec, tol, max_len,
                           expect="product", phi_vec=xi_vec)


def check_free(families, vacuum, max_len=6, tol=1e-9) -> list[CheckReport]:
    """Free independence: centered alternating words vanish in the vacuum state."""
    cent = [_centered(fam, vacuum) for fam in families]
    return _check_families("free", cent, vacuum, tol, max_len, expect="zero")


def check_boolean(families, xi_vec, max_len=6, tol=1e-9) -> list[CheckReport]:
    """Boolean independence: raw alternating words factorize (no centering)."""
    fam = [[(op, operator_norm(_as_matrix(op))) for op in f] for f in families]
    return _check_families("boolean", fam, xi_vec, tol, max_len, expect="product")


def _monotone_oracle(word, phi_vec):
    """Recursive first-peak elimination.

    A peak is an inner position whose neighbors have smaller indices, position
    1 when the sequence starts descending, or the last position when the
    sequence ends ascending (ordering alpha < beta).  The word shrinks by one
    factor per step; adjacent factors from the same algebra merge by matrix
    product.
    """
    word = list(word)
    value = 1.0 + 0.0j
    while len(word) > 1:
        labels = [l for l, _ in word]
        n = len(labels)
        peak = None
        for p in range(n):
            if p == 0:
                if labels[0] > labels[1]:
                    peak = 0
                    break
            elif p == n - 1:
                if labels[n - 2] < labels[n - 1]:
                    peak = n - 1
                    break
            elif labels[p - 1] < labels[p] and labels[p] > labels[p + 1]:
                peak = p
                break
        assert peak is not None, "alternating two-index words always have a peak"
        value *= complex(np.vdot(phi_vec, _apply(word[peak][1], phi_vec)))
        del word[peak]
        merged = [word[0]]
        for lab, op in word[1:]:
            if merged and merged[-1][0] == lab:
                plab, pop = merged.pop()
                merged.append((plab, _as_matrix(pop) @ _as_matrix(op)))
            else:
                merged.append((lab, op))
        word = merged
    lab, op = word[0]
    return value * complex(np.vdot(phi_vec, _apply(op, phi_vec)))


def check_monotone(families, xi_vec, max_len=6, tol=1e-9) -> list[CheckReport]:
    """Monotone independence: the direct moment equals full recursive
    first-peak elimination (the independent evaluator)."""
    reports = []
    norms = [[operator_norm(_as_matrix(op)) for op in f] for f in families]

    def build(labels):
        choices = [range(len(families[l])) for l in labels]
        import itertools
        for members in itertools.product(*choices):
            word = [(l, families[l][m]) for l, m in zip(labels, members)]
            vec = xi_vec
            scale = 1.0
            for (l, op), m in zip(reversed(word), reversed(members)):
                vec = _apply(op, vec)
            for l, m in zip(labels, members):
                scale *= 1.0 + norms[l][m]
            lhs = complex(np.vdot(xi_vec, vec))
            rhs = _monotone_oracle(word, xi_vec)
            reports.append(make_report(
                _word_name("monotone", labels, members), lhs, rhs, tol,
                scale=scale, context={"length": len(labels)}))

    for length in range(2, max_len + 1):
        for start in (ALPHA, BETA):
            labels = tuple((start + k) % 2 for k in range(length))
            build(labels)
    return reports


def check_orthogonal(families, xi_vec, psi_vec, max_len=4, tol=1e-9) -> list[CheckReport]:
    """Orthogonality of the beta family to the alpha family w.r.t. (phi, psi).

    Condition (1): phi(b a2) = phi(a1 b) = 0.  Condition (2):
    phi(w1 a1 b a2 w2) = psi(b) (phi(w1 a1 a2 w2) - phi(w1 a1) phi(a2 w2))
    for words w1, w2 (including the empty word) in the generated algebra.
    """
    alpha_fam, beta_fam = families
    reports = []

    def phi(mats):
        vec = xi_vec
        for m in reversed(mats):
            vec = _apply(m, vec)
        return complex(np.vdot(xi_vec, vec))

    for ib, b in enumerate(beta_fam):
        psi_b = vector_state(b, psi_vec)
        for ia, a in enumerate(alpha_fam):
            reports.append(make_report(f"orthogonal-cond1[b{ib},a{ia}]",
                                       phi([b, a]), 0.0, tol))
            reports.append(make_report(f"orthogonal-cond1[a{ia},b{ib}]",
                                       phi([a, b]), 0.0, tol))

        words = [()]
        gens = [("a", i, op) for i, op in enumerate(alpha_fam)] + \
               [("b", i, op) for i, op in enumerate(beta_fam)]
        for g1 in gens:
            words.append((g1,))
            for g2 in gens:
                words.append((g1, g2))

        for i1, a1 in enumerate(alpha_fam):
            for i2, a2 in enumerate(alpha_fam):
                for w1 in words:
                    for w2 in words:
                        if len(w1) + len(w2) + 3 > max_len + 3:
                            continue
                        m1 = [op for _, _, op in w1]
                        m2 = [op for _, _, op in w2]
                        lhs = phi(m1 + [a1, b, a2] + m2)
                        rhs = psi_b * (phi(m1 + [a1, a2] + m2)
                                       - phi(m1 + [a1]) * phi([a2] + m2))
                        name = (f"orthogonal-cond2[b{ib},a{i1},a{i2},"
                                f"w1={''.join(t+str(i) for t, i, _ in w1) or 'e'},"
                                f"w2={''.join(t+str(i) for t, i, _ in w2) or 'e'}]")
                        reports.append(make_report(name, lhs, rhs, tol))
    return reports
