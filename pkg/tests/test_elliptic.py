import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from pmcsurf.elliptic import (
    DomainError,
    EllipticModulus,
    agm,
    amplitude,
    amplitude_by_ode,
    complete_K,
    gudermannian,
    incomplete_F,
    sn_cn_dn,
)

from oracles import K_ONE_THIRD, K_TWO_SQRT2_THIRDS, F_quad, K_quad

MODULI = [0.0, 0.1, 1 / 3, 0.5, 2 * math.sqrt(2) / 3, 0.99]


def test_modulus_validation():
    assert EllipticModulus(0.5).m == 0.25
    assert EllipticModulus(1.0).complementary == 0.0
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(DomainError):
            EllipticModulus(bad)


def test_agm_known_value():
    # agm(1, sqrt 2) = 1.19814023473559220744...
    assert agm(1.0, math.sqrt(2.0)) == pytest.approx(1.1981402347355922074, rel=1e-15)


def test_complete_K_frozen_values():
    assert complete_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert complete_K(1 / 3) == pytest.approx(K_ONE_THIRD, rel=1e-14)
    assert complete_K(2 * math.sqrt(2) / 3) == pytest.approx(K_TWO_SQRT2_THIRDS, rel=1e-14)


def test_complete_K_domain():
    with pytest.raises(DomainError):
        complete_K(1.0)
    with pytest.raises(DomainError):
        complete_K(-0.2)


def test_quadrature_oracle_agrees_with_mpmath():
    mpmath.mp.dps = 30
    for k in (0.2, 0.7, 0.95):
        assert K_quad(k) == pytest.approx(float(mpmath.ellipk(k * k)), rel=1e-13)


def test_complete_K_matches_oracle_random():
    rng = np.random.default_rng(20261014)
    for k in rng.uniform(0.0, 0.999, 50):
        assert abs(complete_K(k) - K_quad(k)) < 1e-10


def test_incomplete_F_against_mpmath():
    mpmath.mp.dps = 30
    for phi in (-4.0, -1.2, 0.3, 1.5, 2.0, 7.0):
        for k in (0.3, 0.8, 0.999):
            ref = float(mpmath.ellipf(phi, k * k))
            assert incomplete_F(phi, k) == pytest.approx(ref, rel=1e-13, abs=1e-14)


def test_incomplete_F_k1():
    assert incomplete_F(1.0, 1.0) == pytest.approx(math.atanh(math.sin(1.0)), rel=1e-15)
    with pytest.raises(DomainError):
        incomplete_F(math.pi / 2, 1.0)


def test_amplitude_special_values():
    assert amplitude(0.0, 0.4) == 0.0
    x = np.linspace(-5, 5, 11)
    np.testing.assert_array_equal(amplitude(x, 0.0), x)
    assert amplitude(K_ONE_THIRD, 1 / 3) == pytest.approx(math.pi / 2, abs=1e-14)
    np.testing.assert_allclose(amplitude(x, 1.0), 2 * np.arctan(np.exp(x)) - np.pi / 2, atol=1e-14)


def test_amplitude_quasi_periodic():
    k = 0.8
    K = complete_K(k)
    x = np.linspace(-1.0, 1.0, 7)
    np.testing.assert_allclose(amplitude(x + 2 * K, k), amplitude(x, k) + np.pi, atol=1e-13)


def test_amplitude_against_scipy():
    # scipy uses the parameter m = k^2
    x = np.linspace(-10, 10, 201)
    for k in MODULI:
        sn, cn, dn, ph = special.ellipj(x, k * k)
        np.testing.assert_allclose(amplitude(x, k), ph, atol=1e-12)
        got = sn_cn_dn(x, k)
        np.testing.assert_allclose(got[0], sn, atol=1e-12)
        np.testing.assert_allclose(got[2], dn, atol=1e-12)


def test_gudermannian_against_ode():
    x = np.array([-3.0, -0.5, 0.7, 2.5])
    np.testing.assert_allclose(amplitude_by_ode(x, 1.0), gudermannian(x), atol=1e-12)


def test_amplitude_against_ode():
    for k in (0.3, 1 / 3, 0.9):
        x = np.array([-4.0, 0.5, 3.3])
        np.testing.assert_allclose(amplitude_by_ode(x, k), amplitude(x, k), atol=1e-11)


def test_sn_cn_dn_basic():
    assert sn_cn_dn(0.0, 0.6) == (0.0, 1.0, 1.0)
    x = np.linspace(-3, 3, 9)
    sn, cn, dn = sn_cn_dn(x, 0.0)
    np.testing.assert_allclose(sn, np.sin(x), atol=1e-15)
    np.testing.assert_allclose(cn, np.cos(x), atol=1e-15)
    np.testing.assert_array_equal(dn, 1.0)


def test_derivative_is_dn_second_order():
    x = np.linspace(-2.0, 2.0, 41)
    for k in (0.3, 0.9):
        dn = sn_cn_dn(x, k)[2]
        errs = []
        for h in (1e-2, 5e-3):
            d = (amplitude(x + h, k) - amplitude(x - h, k)) / (2 * h)
            errs.append(np.max(np.abs(d - dn)))
        assert 3.5 <= errs[0] / errs[1] <= 4.5


@settings(max_examples=200, deadline=None)
@given(k=st.sampled_from(MODULI), f=st.floats(-3.0, 3.0))
def test_identities(k, f):
    x = f * (complete_K(k) if k < 1 else 1.0)
    sn, cn, dn = sn_cn_dn(x, k)
    assert abs(sn * sn + cn * cn - 1) < 1e-12
    assert abs(dn * dn + k * k * sn * sn - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(k=st.floats(0.0, 0.999), x=st.floats(-20.0, 20.0))
def test_amplitude_odd(k, x):
    assert amplitude(-x, k) == pytest.approx(-amplitude(x, k), abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(k=st.floats(0.0, 1.0), x=st.floats(-10.0, 10.0), d=st.floats(1e-3, 1.0))
def test_amplitude_increasing(k, x, d):
    assert amplitude(x + d, k) > amplitude(x, k)


@settings(max_examples=60, deadline=None)
@given(k=st.floats(0.0, 0.99), phi=st.floats(-1.5, 1.5))
def test_round_trip_with_oracle(k, phi):
    sgn = 1.0 if phi >= 0 else -1.0
    x = sgn * F_quad(abs(phi), k)
    assert abs(amplitude(x, k) - phi) < 1e-11
    assert abs(incomplete_F(phi, k) - x) < 1e-12
