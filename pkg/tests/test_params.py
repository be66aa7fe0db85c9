import math

import pytest
from hypothesis import given, strategies as st

from epsense import NonPositiveRate, Perturbation, SqueezeDiverges, SystemParams, derive, squeeze_moments
from epsense.errors import InvalidParams
from epsense.params import squeeze_parameter, squeezed_frequency

from conftest import valid_params

# 40-digit reference values for chi = 0.3, omega_tilde = 1, J_m = 0.022, g = 2.5e-4
R_03 = 0.154759802101556
G_TILDE_03 = 2.141552278292e-4
DM_03 = 0.953939201416946
J_TILDE_03 = 0.0230622664078822
NS_03 = 0.0241424183609591
MS_03 = 0.157242725508288


def test_unsqueezed_identity():
    d = derive(SystemParams())
    assert (d.r_1, d.r_2) == (0.0, 0.0)
    assert d.g_tilde_1 == 2.5e-4 and d.g_tilde_2 == 2.5e-4
    assert d.Delta_m_1 == 1.0 and d.Delta_m_2 == 1.0
    assert d.J_tilde == 0.022


def test_squeezed_values():
    d = derive(SystemParams().with_chi(0.3))
    assert d.r_1 == pytest.approx(R_03, rel=1e-13)
    assert d.g_tilde_1 == pytest.approx(G_TILDE_03, rel=1e-12)
    assert d.Delta_m_2 == pytest.approx(DM_03, rel=1e-14)
    assert d.J_tilde == pytest.approx(J_TILDE_03, rel=1e-13)
    assert (d.N_s_1, d.M_s_1) == pytest.approx((NS_03, MS_03), rel=1e-12)


def test_rounded_squeeze_matches_closed_form():
    assert squeeze_parameter(1.0, 0.3) == pytest.approx(0.25 * math.log(1.3 / 0.7), rel=1e-14)
    assert squeezed_frequency(1.0, 0.3) == pytest.approx(math.sqrt(0.91), rel=1e-15)


def test_divergent_squeeze():
    with pytest.raises(SqueezeDiverges):
        derive(SystemParams().with_chi(1.0))
    with pytest.raises(SqueezeDiverges):
        derive(SystemParams(chi_2=-1.2))


@pytest.mark.parametrize("field", ["kappa", "gamma_m", "J_m", "n_th_1"])
def test_invalid_rates(field):
    bad = {"kappa": 0.0, "gamma_m": -1e-3, "J_m": -0.1, "n_th_1": -1.0}[field]
    with pytest.raises(InvalidParams):
        derive(SystemParams(**{field: bad}))


def test_kappa_error_type():
    with pytest.raises(NonPositiveRate):
        derive(SystemParams(kappa=-0.1))


def test_squeeze_moments_trivial():
    assert squeeze_moments(0.0, 0.0) == (0.0, 0.0)
    assert squeeze_moments(2.0, 0.0) == (2.0, 0.0)


def test_perturbation_folding():
    p = SystemParams(chi_1=0.2, chi_2=0.2, perturbation=Perturbation(5e-3, 2e-3, 1e-3, -1e-3))
    assert p.omega_tilde() == (1.0, 1.005)
    assert p.gammas() == (1e-3 + 2e-3, 1e-3)
    assert p.chis() == pytest.approx((0.201, 0.199))
    assert p.unperturbed().perturbation.is_zero()
    d = derive(p)
    assert d.Delta_m_2 == math.sqrt(1.005 ** 2 - 0.199 ** 2)


def test_nondegenerate_uses_mean_squeeze():
    d = derive(SystemParams(chi_1=0.1, chi_2=0.5))
    assert d.r_1 < d.r_2
    assert d.J_tilde == pytest.approx(0.022 * math.cosh(d.r_1 + d.r_2), rel=1e-15)
    assert d.g_tilde_1 == pytest.approx(2.5e-4 * math.exp(-d.r_1), rel=1e-15)


@given(valid_params())
def test_derive_is_pure(p):
    assert derive(p) == derive(p)


@given(valid_params())
def test_cosh_identity(p):
    d = derive(p)
    w1, _ = p.omega_tilde()
    assert math.cosh(2 * d.r_1) == pytest.approx(w1 / d.Delta_m_1, rel=1e-12)
    assert d.Delta_m_1 > 0 and d.Delta_m_2 > 0


@given(valid_params())
def test_moments_nonnegative(p):
    d = derive(p)
    assert min(d.N_s_1, d.N_s_2, d.M_s_1, d.M_s_2) >= 0


@given(st.floats(0.0, 0.95), st.floats(1e-3, 0.04))
def test_squeeze_monotone(chi, step):
    a = derive(SystemParams().with_chi(chi))
    b = derive(SystemParams().with_chi(min(chi + step, 0.99)))
    assert b.r_1 > a.r_1
    assert b.Delta_m_1 < a.Delta_m_1
