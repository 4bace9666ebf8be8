import numpy as np
import pytest

from cfree.embeddings import (OperatorPair, embed_boolean, embed_cfree, embed_free,
                              embed_monotone, embed_orthogonal)
from cfree.independence import (check_boolean, check_cfree, check_free,
                                check_monotone, check_orthogonal)
from cfree.spaces import (ALPHA, BETA, H_SIDE, K_SIDE, BasisWord,
                          build_product_basis, spaces_from_dims)
from cfree.states import psi_value, random_selfadjoint, trial_rng


def _k_basis(depth=5, dims=(3, 3, 3, 3)):
    return build_product_basis(spaces_from_dims(dims), depth, K_SIDE)


def test_check_free_passes_on_left_regular_representations():
    kb = _k_basis()
    rng = trial_rng(100, 0)
    fams = [[embed_free(random_selfadjoint(rng, 3), ALPHA, kb) for _ in range(2)],
            [embed_free(random_selfadjoint(rng, 3), BETA, kb) for _ in range(2)]]
    reports = check_free(fams, kb.vacuum_vector(), max_len=5, tol=1e-9)
    assert reports and all(r.passed for r in reports)


def test_check_free_fails_on_shared_algebra():
    kb = _k_basis()
    rng = trial_rng(100, 1)
    s1 = random_selfadjoint(rng, 3)
    s2 = random_selfadjoint(rng, 3)
    fams = [[embed_free(s1, ALPHA, kb)], [embed_free(s2, ALPHA, kb)]]
    reports = check_free(fams, kb.vacuum_vector(), max_len=4, tol=1e-9)
    assert any(not r.passed for r in reports)
    assert max(r.abs_err for r in reports) > 1e-7


def test_check_cfree_passes_with_marginal_centering():
    hb = build_product_basis(spaces_from_dims((3, 3, 3, 3)), 6, H_SIDE)
    rng = trial_rng(101, 0)
    pa = OperatorPair(ALPHA, random_selfadjoint(rng, 3), random_selfadjoint(rng, 3))
    pb = OperatorPair(BETA, random_selfadjoint(rng, 3), random_selfadjoint(rng, 3))
    fams = [[embed_cfree(pa, hb)], [embed_cfree(pb, hb)]]
    vals = [[psi_value(pa)], [psi_value(pb)]]
    reports = check_cfree(fams, hb.vacuum_vector(), psi_values=vals,
                          max_len=6, tol=1e-9)
    assert reports and all(r.passed for r in reports)
    # the factorized values are generically nonzero, so the check is not vacuous
    assert any(abs(r.rhs) > 1e-3 for r in reports)


def test_check_cfree_requires_exactly_one_psi_source():
    hb = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 2, H_SIDE)
    with pytest.raises(ValueError):
        check_cfree([[], []], hb.vacuum_vector())


def test_check_boolean_on_boolean_embeddings():
    hb = build_product_basis(spaces_from_dims((3, 1, 3, 1)), 2, H_SIDE)
    rng = trial_rng(102, 0)
    fams = [[embed_boolean(random_selfadjoint(rng, 3), ALPHA, hb) for _ in range(2)],
            [embed_boolean(random_selfadjoint(rng, 3), BETA, hb) for _ in range(2)]]
    reports = check_boolean(fams, hb.vacuum_vector(), max_len=5, tol=1e-10)
    assert reports and all(r.passed for r in reports)


def test_check_boolean_fails_on_unital_embeddings():
    """Unital copies (scalar 1 on the foreign block) are not Boolean independent."""
    hb = build_product_basis(spaces_from_dims((3, 1, 3, 1)), 2, H_SIDE)
    rng = trial_rng(102, 1)
    one = np.ones((1, 1), dtype=complex)
    fams = [[embed_cfree(OperatorPair(ALPHA, random_selfadjoint(rng, 3) + np.eye(3),
                                      one), hb)],
            [embed_cfree(OperatorPair(BETA, random_selfadjoint(rng, 3) + np.eye(3),
                                      one), hb)]]
    reports = check_boolean(fams, hb.vacuum_vector(), max_len=4, tol=1e-10)
    assert any(not r.passed for r in reports)


def test_check_monotone_on_monotone_embeddings():
    hb = build_product_basis(spaces_from_dims((3, 1, 3, 3)), 2, H_SIDE)
    rng = trial_rng(103, 0)
    fams = [[embed_monotone(random_selfadjoint(rng, 3), ALPHA, hb) for _ in range(2)],
            [embed_monotone(random_selfadjoint(rng, 3), BETA, hb) for _ in range(2)]]
    reports = check_monotone(fams, hb.vacuum_vector(), max_len=5, tol=1e-10)
    assert reports and all(r.passed for r in reports)


def test_monotone_first_peak_cases():
    """Words starting with the larger index have their peak at position 1, so
    the law factors off the leading element."""
    hb = build_product_basis(spaces_from_dims((3, 1, 3, 3)), 2, H_SIDE)
    rng = trial_rng(103, 1)
    a = embed_monotone(random_selfadjoint(rng, 3), ALPHA, hb)
    b = embed_monotone(random_selfadjoint(rng, 3), BETA, hb)
    xi = hb.vacuum_vector()

    def phi(ops):
        v = xi
        for op in reversed(ops):
            v = op.apply(v)
        return complex(np.vdot(xi, v))

    # (beta, alpha): peak at p = 1
    assert phi([b, a]) == pytest.approx(phi([b]) * phi([a]), abs=1e-12)
    # (alpha, beta): peak at p = n
    assert phi([a, b]) == pytest.approx(phi([b]) * phi([a]), abs=1e-12)
    # (alpha, beta, alpha): inner peak, phi(a1 b a2) = phi(b) phi(a1 a2)
    assert phi([a, b, a]) == pytest.approx(phi([b]) * phi([a @ a]), abs=1e-12)


def test_check_monotone_fails_when_order_swapped():
    hb = build_product_basis(spaces_from_dims((3, 1, 3, 3)), 2, H_SIDE)
    rng = trial_rng(103, 2)
    fams = [[embed_monotone(random_selfadjoint(rng, 3), BETA, hb)],
            [embed_monotone(random_selfadjoint(rng, 3), ALPHA, hb)]]
    reports = check_monotone(fams, hb.vacuum_vector(), max_len=4, tol=1e-10)
    assert any(not r.passed for r in reports)


def test_check_orthogonal_on_orthogonal_embeddings():
    hb = build_product_basis(spaces_from_dims((3, 1, 1, 3)), 2, H_SIDE)
    rng = trial_rng(104, 0)
    fams = [[embed_orthogonal(random_selfadjoint(rng, 3), ALPHA, hb) for _ in range(2)],
            [embed_orthogonal(random_selfadjoint(rng, 3), BETA, hb) for _ in range(2)]]
    psi_vec = hb.basis_vector(BasisWord((), (ALPHA, 1)))
    reports = check_orthogonal(fams, hb.vacuum_vector(), psi_vec, tol=1e-9)
    assert reports and all(r.passed for r in reports)


def test_check_orthogonal_fails_with_bad_psi_vector():
    """The second state must sit in the reduced alpha block; a vector with a
    letter component breaks condition (2)."""
    hb = build_product_basis(spaces_from_dims((3, 1, 1, 3)), 2, H_SIDE)
    rng = trial_rng(104, 1)
    fams = [[embed_orthogonal(random_selfadjoint(rng, 3), ALPHA, hb)],
            [embed_orthogonal(random_selfadjoint(rng, 3), BETA, hb)]]
    bad = hb.basis_vector(BasisWord(((BETA, 1),), (ALPHA, 1)))
    reports = check_orthogonal(fams, hb.vacuum_vector(), bad, tol=1e-9)
    assert any(not r.passed for r in reports)


def test_scalar_families_trivially_cfree():
    hb = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 4, H_SIDE)
    ops_a = [embed_cfree(OperatorPair(ALPHA, 2.0 * np.eye(2), 2.0 * np.eye(2)), hb)]
    ops_b = [embed_cfree(OperatorPair(BETA, -1.5 * np.eye(2), -1.5 * np.eye(2)), hb)]
    vals = [[2.0], [-1.5]]
    reports = check_cfree([ops_a, ops_b], hb.vacuum_vector(), psi_values=vals,
                          max_len=4, tol=1e-12)
    assert all(r.passed for r in reports)
