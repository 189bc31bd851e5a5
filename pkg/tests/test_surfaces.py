import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcsurf.elliptic import DomainError, complete_K
from pmcsurf.surfaces import (
    BoundaryMinus,
    BoundaryPlus,
    GeneralHigh,
    GeneralLow,
    Hirakawa,
    SingularPoint,
    SurfaceParams,
    alpha_ode_rhs,
    domain_halfwidth,
    family_from_tag,
    frame_data,
    gauss_curvature,
    general,
    hirakawa_alpha_ode,
    kaehler_angle,
    theta_phase,
)

from oracles import HIRAKAWA_UMAX_B1, K_ONE_THIRD, K_TWO_SQRT2_THIRDS

FAMILIES = [BoundaryPlus(), BoundaryMinus(), Hirakawa(), GeneralLow(0.05), GeneralLow(0.2),
            GeneralHigh(0.3), GeneralHigh(1.0), GeneralHigh(5.0)]
families = st.sampled_from(FAMILIES)
bs = st.floats(0.3, 3.0)
ts = st.floats(0.0, math.pi)
fracs = st.floats(-0.99, 0.99)


def _u(params, f):
    u = f * domain_halfwidth(params)
    if isinstance(params.family, BoundaryMinus) and abs(f) < 1e-2:
        u = 1e-2 * domain_halfwidth(params)
    return u


def test_family_validation():
    for bad in (0.0, 0.25, 0.3, -1.0):
        with pytest.raises(DomainError):
            GeneralLow(bad)
    for bad in (0.25, 0.1, math.inf):
        with pytest.raises(DomainError):
            GeneralHigh(bad)
    with pytest.raises(DomainError):
        general(0.25)
    assert isinstance(general(0.1), GeneralLow) and isinstance(general(2.0), GeneralHigh)
    with pytest.raises(DomainError):
        BoundaryPlus(p=0.3)


def test_family_tags():
    assert family_from_tag("hirakawa") == Hirakawa()
    assert family_from_tag("general", 0.1) == GeneralLow(0.1)
    assert family_from_tag("Boundary-Minus") == BoundaryMinus()
    with pytest.raises(DomainError):
        family_from_tag("general")
    with pytest.raises(DomainError):
        family_from_tag("hirakawa", 0.1)
    with pytest.raises(DomainError):
        family_from_tag("torus")


def test_params_validation():
    with pytest.raises(DomainError):
        SurfaceParams(0.0, 0.0, Hirakawa())
    with pytest.raises(DomainError):
        SurfaceParams(1.0, 4.0, Hirakawa())
    assert SurfaceParams(2.0, 0.0, Hirakawa()).rho == -12.0


def test_domain_halfwidth_values():
    assert domain_halfwidth(SurfaceParams(1, 0, BoundaryPlus())) == pytest.approx(K_ONE_THIRD / 9, rel=1e-14)
    assert domain_halfwidth(SurfaceParams(1, 0, BoundaryMinus())) == pytest.approx(K_TWO_SQRT2_THIRDS / 9, rel=1e-14)
    assert domain_halfwidth(SurfaceParams(1, 0, Hirakawa())) == pytest.approx(HIRAKAWA_UMAX_B1, rel=1e-14)
    p = 0.1
    ref = complete_K(math.sqrt(p / (2 + p))) / (6 * math.sqrt(2 + p))
    assert domain_halfwidth(SurfaceParams(1, 0, GeneralLow(p))) == pytest.approx(ref, rel=1e-15)
    assert domain_halfwidth(SurfaceParams(0.5, 0, Hirakawa())) == pytest.approx(4 * HIRAKAWA_UMAX_B1, rel=1e-14)


def test_domain_shrinks_for_large_p():
    widths = [domain_halfwidth(SurfaceParams(1, 0, GeneralHigh(p))) for p in (1, 1e2, 1e4, 1e6)]
    assert all(np.diff(widths) < 0) and widths[-1] < 1e-3


def test_domain_error_outside():
    P = SurfaceParams(1, 0, Hirakawa())
    with pytest.raises(DomainError):
        kaehler_angle(P, domain_halfwidth(P))
    with pytest.raises(DomainError):
        frame_data(P, [0.0, 1.0])


def test_kaehler_angle_at_center():
    for fam in (BoundaryPlus(), GeneralLow(0.07), Hirakawa()):
        assert kaehler_angle(SurfaceParams(1.3, 0, fam), 0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    for p in (0.3, 1.0, 5.0):
        a = kaehler_angle(SurfaceParams(1, 0, GeneralHigh(p)), 0.0)
        assert math.sin(a) ** 2 == pytest.approx((8 - 2 / p) / 9, rel=1e-14)


def test_general_high_edge_limit():
    P = SurfaceParams(1, 0, GeneralHigh(1.0))
    u = (1 - 1e-7) * domain_halfwidth(P)
    assert math.sin(kaehler_angle(P, u)) ** 2 == pytest.approx(8 / 9, abs=1e-9)


def test_general_high_alpha_ode_integration():
    # integrate the alpha-ODE from the closed form at u = 0.3 u_max out to 0.8 u_max
    P = SurfaceParams(1, 0, GeneralHigh(1.0))
    um = domain_halfwidth(P)
    u0, u1, n = 0.3 * um, 0.8 * um, 4000
    h = (u1 - u0) / n
    # alpha in (0, pi/2] increases toward asin(sqrt(8/9)) for u > 0
    f = lambda al: alpha_ode_rhs(P, math.sin(al) ** 2)  # noqa: E731
    al = kaehler_angle(P, u0)
    for _ in range(n):
        k1 = f(al)
        k2 = f(al + 0.5 * h * k1)
        k3 = f(al + 0.5 * h * k2)
        k4 = f(al + h * k3)
        al += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert al == pytest.approx(kaehler_angle(P, u1), abs=1e-10)


def test_hirakawa_closed_form_vs_ode():
    for b in (0.5, 1.0, 2.0):
        P = SurfaceParams(b, 0, Hirakawa())
        u = np.linspace(0, 0.99, 12) * domain_halfwidth(P)
        closed = np.arccos(-np.sin(6 * math.sqrt(2) * b * b * u) / 3)
        np.testing.assert_allclose(kaehler_angle(P, u), closed, atol=1e-14)
        np.testing.assert_allclose(hirakawa_alpha_ode(b, u), closed, atol=1e-10)


def test_boundary_plus_center_values():
    b = 1.7
    f = frame_data(SurfaceParams(b, 0.4, BoundaryPlus()), 0.0)
    assert abs(f.mu) == pytest.approx(6 * b)
    assert f.mu == pytest.approx(-6 * b)  # orientation making alpha increase
    assert f.a == pytest.approx(-1.25 * b)
    assert abs(f.c) == pytest.approx(b / 4)
    assert gauss_curvature(SurfaceParams(1, 0, BoundaryPlus()), 0.0) == pytest.approx(-9 / 4)


def test_boundary_data_real():
    for fam in (BoundaryPlus(), BoundaryMinus()):
        P = SurfaceParams(1, 0, fam)
        u = np.linspace(0.05, 0.95, 9) * domain_halfwidth(P)
        f = frame_data(P, u)
        np.testing.assert_array_equal(f.mu.imag, 0)
        np.testing.assert_allclose(f.a.imag, 0, atol=1e-15)
        np.testing.assert_allclose(f.a.real, 1.0 - 2.25 * f.sin2_alpha, atol=1e-13)


def test_boundary_minus_singular_at_center():
    with pytest.raises(SingularPoint):
        frame_data(SurfaceParams(1, 0, BoundaryMinus()), 0.0)


def test_hirakawa_c_zero_and_constant_K():
    for b in (0.5, 1.0, 2.0):
        P = SurfaceParams(b, 1.0, Hirakawa())
        u = np.linspace(-0.999, 0.999, 301) * domain_halfwidth(P)
        f = frame_data(P, u)
        np.testing.assert_array_equal(f.c, 0)
        np.testing.assert_allclose(f.gauss_K, -2 * b * b, atol=1e-9 * b * b)
        # the Ricci relation with c = 0 fixes |a|^2 = (3b^2/2)(3 sin^2 alpha - 2)
        np.testing.assert_allclose(np.abs(f.a) ** 2, 1.5 * b * b * (3 * f.sin2_alpha - 2), atol=1e-12)


def test_theta_phase_values():
    P = SurfaceParams(1, 0, Hirakawa())
    th = theta_phase(P, math.pi / 2)
    assert complex(math.cos(th), math.sin(th)) == pytest.approx((2 * math.sqrt(2) + 1j) / 3, abs=1e-15)
    # at p = 1/4 the phase is real
    Q = SurfaceParams(1, 0, BoundaryPlus())
    assert theta_phase(Q, 1.3) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(SingularPoint):
        theta_phase(P, math.asin(math.sqrt(8 / 9)))


def test_b_scaling_of_curvature():
    for fam in (GeneralLow(0.1), GeneralHigh(2.0), BoundaryPlus()):
        P1, P2 = SurfaceParams(1, 0, fam), SurfaceParams(1.6, 0, fam)
        u1 = np.linspace(-0.9, 0.9, 11) * domain_halfwidth(P1)
        np.testing.assert_allclose(gauss_curvature(P2, u1 / 1.6**2), 1.6**2 * gauss_curvature(P1, u1),
                                   rtol=1e-12)


def test_frame_data_immutable():
    f = frame_data(SurfaceParams(1, 0, Hirakawa()), np.array([0.0, 0.01]))
    with pytest.raises(ValueError):
        f.mu[0] = 1.0


def test_general_tends_to_boundary():
    fr = np.linspace(0.1, 0.9, 9)
    for p, ref in ((0.25 - 1e-8, BoundaryPlus()), (0.25 + 1e-8, BoundaryMinus())):
        P, Q = SurfaceParams(1, 0.3, general(p)), SurfaceParams(1, 0.3, ref)
        fp, fq = frame_data(P, fr * domain_halfwidth(P)), frame_data(Q, fr * domain_halfwidth(Q))
        np.testing.assert_allclose(fp.sin2_alpha, fq.sin2_alpha, atol=1e-6)
        np.testing.assert_allclose(fp.gauss_K, fq.gauss_K, atol=1e-5)


@settings(max_examples=150, deadline=None)
@given(fam=families, b=bs, t=ts, f=fracs)
def test_pointwise_invariants(fam, b, t, f):
    P = SurfaceParams(b, t, fam)
    d = frame_data(P, _u(P, f))
    assert math.sin(d.alpha) > 0
    assert d.metric == d.mu.real**2 + d.mu.imag**2
    # eta = 8 - 9 sin^2 alpha is evaluated from cn to avoid cancellation near the edge
    assert abs(d.eta - (8 - 9 * d.sin2_alpha)) < 1e-12
    assert d.metric == pytest.approx(36 * b * b / abs(d.eta), rel=1e-12)
    assert abs(((d.a + b) * d.mu).imag) <= 1e-12 * max(1.0, abs(d.mu) * b)
    assert d.a.imag >= 0 or not fam.low


@settings(max_examples=150, deadline=None)
@given(fam=families, b=bs, f=st.floats(0.02, 0.99))
def test_sin2_alpha_even(fam, b, f):
    # alpha itself is even on the high families and satisfies alpha(-u) = pi - alpha(u) on the low ones
    P = SurfaceParams(b, 0, fam)
    u = _u(P, f)
    a_plus, a_minus = kaehler_angle(P, u), kaehler_angle(P, -u)
    assert abs(math.sin(a_plus) ** 2 - math.sin(a_minus) ** 2) < 1e-12
    if fam.low:
        assert abs(a_plus + a_minus - math.pi) < 1e-12
    else:
        assert abs(a_plus - a_minus) < 1e-12


@settings(max_examples=150, deadline=None)
@given(p=st.one_of(st.floats(1e-6, 0.2499), st.floats(0.2501, 50.0)), f=fracs)
def test_c_modulus(p, f):
    P = SurfaceParams(1.0, 0.5, general(p))
    d = frame_data(P, _u(P, f))
    assert abs(d.c) ** 2 == pytest.approx(p / 4 * d.eta**2, rel=1e-12)
