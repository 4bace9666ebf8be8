import numpy as np
import pytest

from cfree.embeddings import OperatorPair, embed_cfree, embed_free, identity_operator
from cfree.errors import CenteringError, DepthOverflowError
from cfree.spaces import ALPHA, BETA, H_SIDE, K_SIDE, build_product_basis, \
    spaces_from_dims
from cfree.states import (MomentData, alternating_word_vector, mixed_moment,
                          moment_data, moments_of_matrix, psi_center, psi_value,
                          random_centered_pair, random_pair, random_selfadjoint,
                          trial_rng, vector_state)

FLIP = np.array([[0, 1], [1, 0]], dtype=complex)


def test_vector_state_identity():
    v = np.array([0.6, 0.8], dtype=complex)
    assert vector_state(np.eye(2), v) == pytest.approx(1.0)


def test_vector_state_requires_unit_vector():
    with pytest.raises(ValueError):
        vector_state(np.eye(2), np.array([1.0, 1.0]))


def test_mixed_moment_empty_and_single():
    basis = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 3, H_SIDE)
    xi = basis.vacuum_vector()
    assert mixed_moment([], xi) == pytest.approx(1.0)
    rng = trial_rng(0, 0)
    pair = random_pair(rng, ALPHA, 2, 2)
    lam = embed_cfree(pair, basis)
    assert mixed_moment([lam], xi) == pytest.approx(vector_state(lam, xi))


def test_mixed_moment_warns_beyond_depth():
    basis = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 2, H_SIDE)
    xi = basis.vacuum_vector()
    lam = embed_cfree(OperatorPair(ALPHA, np.eye(2), np.eye(2)), basis)
    with pytest.warns(UserWarning):
        mixed_moment([lam, lam, lam], xi)


def test_psi_center():
    rng = trial_rng(0, 1)
    pair = random_pair(rng, ALPHA, 3, 3)
    centered = psi_center(pair)
    assert abs(psi_value(centered)) <= 1e-14
    already = psi_center(centered)
    assert np.allclose(already.T, centered.T)
    zeroed = psi_center(OperatorPair(BETA, np.eye(2), np.eye(2)))
    assert np.allclose(zeroed.T, 0.0)
    assert np.allclose(zeroed.S, 0.0)


def test_alternating_word_vector_single_factor():
    basis = build_product_basis(spaces_from_dims((3, 3, 3, 3)), 3, H_SIDE)
    rng = trial_rng(0, 2)
    pair = random_centered_pair(rng, ALPHA, 3, 3)
    vec = alternating_word_vector([pair], basis)
    expected = np.zeros(basis.count, dtype=complex)
    expected[0] = pair.T[0, 0]
    expected[basis.index[basis.words[1]]] = pair.T[1, 0]
    expected[basis.index[basis.words[2]]] = pair.T[2, 0]
    assert np.allclose(vec, expected)


def test_alternating_word_vector_degenerate_zero():
    """With centered T-expectations gone and no reduced S component the word
    vector vanishes for n >= 2."""
    basis = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 4, H_SIDE)
    t = np.array([[0.0, 1.0], [1.0, 0.0]])  # phi(T) = 0
    s = np.zeros((2, 2))
    pa = OperatorPair(ALPHA, t, s)
    pb = OperatorPair(BETA, t, s)
    vec = alternating_word_vector([pa, pb], basis)
    assert np.allclose(vec, 0.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_alternating_word_vector_matches_matrix_application(n):
    basis = build_product_basis(spaces_from_dims((3, 3, 3, 3)), 6, H_SIDE)
    pairs = [random_centered_pair(trial_rng(13, i), i % 2, 3, 3) for i in range(n)]
    closed = alternating_word_vector(pairs, basis)
    acc = basis.vacuum_vector()
    for p in pairs:
        acc = embed_cfree(p, basis).apply(acc)
    assert np.max(np.abs(closed - acc)) <= 1e-11


def test_alternating_word_vector_preconditions():
    basis = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 3, H_SIDE)
    rng = trial_rng(0, 3)
    uncentered = random_pair(rng, ALPHA, 2, 2)
    with pytest.raises(CenteringError):
        alternating_word_vector([uncentered], basis)
    a = random_centered_pair(rng, ALPHA, 2, 2)
    with pytest.raises(ValueError):
        alternating_word_vector([a, a], basis)
    b = random_centered_pair(rng, BETA, 2, 2)
    with pytest.raises(DepthOverflowError):
        alternating_word_vector([a, b, a, b], basis)


def test_moment_data_identity_and_flip():
    basis = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 4, H_SIDE)
    kb = build_product_basis(spaces_from_dims((2, 2, 2, 2)), 4, K_SIDE)
    ident_h = identity_operator(basis)
    ident_k = identity_operator(kb)
    md = moment_data(ident_h, ident_k, 4)
    assert all(m == pytest.approx(1.0) for m in md.phi_moments)
    assert all(m == pytest.approx(1.0) for m in md.psi_moments)

    pair = OperatorPair(ALPHA, FLIP, FLIP)
    md = moment_data(embed_cfree(pair, basis), embed_free(FLIP, ALPHA, kb), 4)
    assert np.allclose(md.phi_moments, [0, 1, 0, 1])
    assert np.allclose(md.psi_moments, [0, 1, 0, 1])
    with pytest.raises(DepthOverflowError):
        moment_data(ident_h, ident_k, 5)


def test_single_pair_phi_moments_are_small_space_powers():
    basis = build_product_basis(spaces_from_dims((3, 3, 3, 3)), 5, H_SIDE)
    kb = build_product_basis(spaces_from_dims((3, 3, 3, 3)), 5, K_SIDE)
    rng = trial_rng(21, 0)
    pair = random_pair(rng, ALPHA, 3, 3)
    md = moment_data(embed_cfree(pair, basis), embed_free(pair.S, ALPHA, kb), 5)
    assert np.allclose(md.phi_moments, moments_of_matrix(pair.T, 5), atol=1e-12)
    assert np.allclose(md.psi_moments, moments_of_matrix(pair.S, 5), atol=1e-12)


def test_moments_stable_under_depth_growth():
    rng = trial_rng(21, 1)
    pa = random_pair(rng, ALPHA, 3, 3)
    pb = random_pair(rng, BETA, 3, 3)
    values = []
    for depth in (4, 5):
        basis = build_product_basis(spaces_from_dims((3, 3, 3, 3)), depth, H_SIDE)
        op = embed_cfree(pa, basis) + embed_cfree(pb, basis)
        acc = basis.vacuum_vector()
        out = []
        for _ in range(4):
            acc = op.apply(acc)
            out.append(complex(np.vdot(basis.vacuum_vector(), acc)))
        values.append(out)
    assert np.allclose(values[0], values[1], atol=1e-12)


def test_moment_data_serialization():
    md = MomentData(2, (1 + 2j, 3.0), (0.5, -1j))
    csv_text = md.to_csv()
    assert csv_text.splitlines()[0] == "n,re_m_phi,im_m_phi,re_m_psi,im_m_psi"
    assert "1,1.0,2.0,0.5,0.0" in csv_text
    obj = md.to_json_obj()
    assert obj["order"] == 2
    assert obj["phi"][0] == [1.0, 2.0]


def test_trial_rng_reproducible_and_independent():
    a1 = random_selfadjoint(trial_rng(42, 7), 4)
    a2 = random_selfadjoint(trial_rng(42, 7), 4)
    b = random_selfadjoint(trial_rng(42, 8), 4)
    assert np.allclose(a1, a2)
    assert not np.allclose(a1, b)
    from cfree import numkernel as nk
    assert nk.spectral_norm(a1) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(a1, a1.conj().T)
