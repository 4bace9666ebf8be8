import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfree.errors import SeriesError
from cfree.series import (TruncatedLaurentSeries, cfree_r_transform,
                          check_linearization_series, compositional_inverse,
                          free_cumulants, free_r_from_moments, identity_series,
                          k_series, series_from_moments)
from cfree.states import MomentData
from oracles import lagrange_inverse_coeffs


def flip_moments(order):
    seq = tuple((0.0 if n % 2 else 1.0) for n in range(1, order + 1))
    return MomentData(order, seq, seq)


def test_reciprocal_geometric():
    s = TruncatedLaurentSeries(0, (1.0, -1.0, 0.0, 0.0, 0.0))
    assert np.allclose(s.reciprocal().coeffs, [1, 1, 1, 1, 1])


def test_compose_identity_substitution():
    f = TruncatedLaurentSeries(1, (1.0, 1.0))  # t + t^2
    assert np.allclose(f.compose(identity_series(2)).coeffs[1:], (1.0, 1.0))


def test_mul_shift():
    t = identity_series(4)
    g = TruncatedLaurentSeries(0, (1.0, 0.0, 1.0, 0.0))
    prod = t * g
    assert prod.valuation == 1
    assert prod.coefficient(1) == 1.0
    assert prod.coefficient(3) == 1.0


def test_series_from_moments_structure():
    md = MomentData(3, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    h = series_from_moments(md, "phi")
    assert h.coefficient(0) == 1.0
    assert all(h.coefficient(n) == 0.0 for n in (1, 2, 3))
    k = k_series(series_from_moments(md, "psi"))
    assert k.valuation == 1 and k.coefficient(1) == 1.0


def test_compositional_inverse_flip_closed_form():
    md = flip_moments(9)
    k = k_series(series_from_moments(md, "psi"))
    kinv = compositional_inverse(k)
    expected = [1, 0, -1, 0, 2, 0, -5, 0, 14, 0]
    assert np.allclose([kinv.coefficient(n) for n in range(1, 11)], expected)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5_000))
def test_compositional_inverse_matches_lagrange_oracle(seed):
    rng = np.random.default_rng(seed)
    moments = rng.uniform(-1.0, 1.0, 8)
    md = MomentData(8, tuple(moments), tuple(moments))
    k = k_series(series_from_moments(md, "psi"))
    kinv = compositional_inverse(k)
    oracle = lagrange_inverse_coeffs((1.0,) + tuple(moments), kinv.order)
    ours = [kinv.coefficient(n) for n in range(1, kinv.order + 1)]
    assert np.allclose(ours, oracle, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5_000))
def test_compose_inverse_roundtrip(seed):
    # moment sequences of norm-one elements: |m_n| <= 1
    rng = np.random.default_rng(seed)
    moments = rng.uniform(-1.0, 1.0, 8)
    md = MomentData(8, tuple(moments), tuple(moments))
    k = k_series(series_from_moments(md, "psi"))
    kinv = compositional_inverse(k)
    resid = k.compose(kinv) - identity_series(kinv.order)
    scale = max(1.0, kinv.max_abs_coeff())
    assert resid.max_abs_coeff() <= 1e-12 * scale


def test_compositional_inverse_preconditions():
    with pytest.raises(SeriesError):
        compositional_inverse(TruncatedLaurentSeries(0, (1.0, 1.0)))
    with pytest.raises(SeriesError):
        compositional_inverse(TruncatedLaurentSeries(1, (2.0, 1.0)))


def test_reciprocal_preconditions():
    with pytest.raises(SeriesError):
        TruncatedLaurentSeries(0, (0.0, 1.0)).normalized().shift(1).reciprocal() \
            .reciprocal().reciprocal()
    with pytest.raises(SeriesError):
        TruncatedLaurentSeries(2, (1.0, 0.0)).reciprocal()


def test_laurent_cap():
    with pytest.raises(SeriesError):
        TruncatedLaurentSeries(-2, (1.0,))
    s = TruncatedLaurentSeries(-1, (1.0, 0.0))
    with pytest.raises(SeriesError):
        s * s


def test_cfree_r_constant_term_is_first_phi_moment():
    rng = np.random.default_rng(11)
    phi = rng.standard_normal(6) * 0.8
    psi = rng.standard_normal(6) * 0.8
    md = MomentData(6, tuple(phi), tuple(psi))
    r = cfree_r_transform(md)
    assert r.coefficient(0) == pytest.approx(phi[0], abs=1e-12)


def test_cfree_r_flip_equals_free_r():
    md = flip_moments(9)
    r = cfree_r_transform(md)
    expected = [0, 1, 0, -1, 0, 2, 0, -5]
    assert np.allclose([r.coefficient(n) for n in range(8)], expected, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5_000))
def test_free_reduction_matches_cumulant_recursion(seed):
    rng = np.random.default_rng(seed)
    moments = tuple(rng.uniform(-1.0, 1.0, 10))
    md = MomentData(10, moments, moments)
    r = cfree_r_transform(md)
    oracle = free_r_from_moments(moments)
    for n in range(0, 9):
        assert abs(r.coefficient(n) - oracle.coefficient(n)) <= 1e-10


def test_free_cumulants_of_bernoulli():
    kappa = free_cumulants([0, 1, 0, 1, 0, 1, 0, 1])
    assert np.allclose(kappa, [0, 1, 0, -1, 0, 2, 0, -5])


def test_zero_and_identity_moment_edge_cases():
    md0 = MomentData(5, (0,) * 5, (0,) * 5)
    r0 = cfree_r_transform(md0)
    assert all(abs(r0.coefficient(n)) <= 1e-14 for n in range(4))
    md1 = MomentData(5, (1,) * 5, (1,) * 5)
    r1 = cfree_r_transform(md1)
    assert r1.coefficient(0) == pytest.approx(1.0, abs=1e-12)
    assert all(abs(r1.coefficient(n)) <= 1e-12 for n in range(1, 4))


def test_linearization_trivial_cases():
    rng = np.random.default_rng(3)
    phi = tuple(rng.standard_normal(6) * 0.5)
    psi = tuple(rng.standard_normal(6) * 0.5)
    md_a = MomentData(6, phi, psi)
    md_zero = MomentData(6, (0,) * 6, (0,) * 6)
    rep = check_linearization_series(md_a, md_zero, md_a, order=4, tol=1e-10)
    assert rep.passed

    scal_a = MomentData(6, tuple(2.0 ** n for n in range(1, 7)),
                        tuple(2.0 ** n for n in range(1, 7)))
    scal_b = MomentData(6, tuple((-1.0) ** n for n in range(1, 7)),
                        tuple((-1.0) ** n for n in range(1, 7)))
    scal_sum = MomentData(6, tuple(1.0 ** n for n in range(1, 7)),
                          tuple(1.0 ** n for n in range(1, 7)))
    rep = check_linearization_series(scal_a, scal_b, scal_sum, order=4, tol=1e-9)
    assert rep.passed


def test_linearization_order_mismatch():
    md = flip_moments(6)
    with pytest.raises(SeriesError):
        check_linearization_series(md, md, flip_moments(5), order=4)
    with pytest.raises(SeriesError):
        check_linearization_series(md, md, md, order=6)


def test_evaluation_and_json():
    s = TruncatedLaurentSeries(-1, (2.0, 1.0, 3.0))
    assert s(0.5) == pytest.approx(2.0 / 0.5 + 1.0 + 3.0 * 0.5)
    obj = s.to_json_obj()
    assert obj["valuation"] == -1
    assert obj["coeffs"][0] == [2.0, 0.0]


def test_derivative():
    s = TruncatedLaurentSeries(0, (5.0, 2.0, 3.0))
    d = s.derivative()
    assert d.valuation == 0
    assert d.coefficient(0) == 2.0
    assert d.coefficient(1) == 6.0
    s1 = TruncatedLaurentSeries(1, (1.0, 4.0))
    assert s1.derivative().coefficient(0) == 1.0
    assert s1.derivative().coefficient(1) == 8.0


def test_compose_with_laurent_head():
    # f = 1/t + 2 + t (with higher coefficients known to vanish), g = t + t^2
    f = TruncatedLaurentSeries(-1, (1.0, 2.0, 1.0, 0.0, 0.0))
    g = TruncatedLaurentSeries(1, (1.0, 1.0, 0.0, 0.0, 0.0, 0.0))
    comp = f.compose(g)
    # 1/(t + t^2) = 1/t - 1 + t - t^2 + ...; adding 2 + (t + t^2)
    assert comp.coefficient(-1) == pytest.approx(1.0)
    assert comp.coefficient(0) == pytest.approx(1.0)
    assert comp.coefficient(1) == pytest.approx(2.0)
    assert comp.coefficient(2) == pytest.approx(0.0, abs=1e-14)
    assert comp.coefficient(3) == pytest.approx(1.0)
    ts = 0.01
    direct = 1.0 / (ts + ts ** 2) + 2.0 + (ts + ts ** 2)
    assert comp(ts) == pytest.approx(direct, rel=1e-8)
