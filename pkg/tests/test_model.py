import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salaser import model
from salaser.errors import ParameterError, RegimeWarning
from salaser.model import (ActiveMedium, CavityField, Injection, LaserSystem, OperatingPoint,
                           PassiveMedium, check_regime, derive_constants, design_system,
                           make_point, saturation_parameters)

rates = st.floats(1e-3, 1e6)


def system(g=1.0, G1=4.0, G2=1.0, R=2.0, gp=1.0, y1=1.0, y2=4.0, Rp=0.0, kappa=1.0, **kw):
    return LaserSystem(ActiveMedium(G1, G2, g, R, kw.get("s", 0.0)),
                       PassiveMedium(y1, y2, gp, Rp), CavityField(kappa, kw.get("inj")))


def test_derive_constants_plugin_values():
    c = derive_constants(system())
    assert c.beta == 1.0
    assert c.gain_A == 2.0


def test_zero_absorber_coupling_rejected():
    with pytest.raises(ParameterError, match="passive.coupling"):
        PassiveMedium(1.0, 4.0, 0.0, 1.0)


@pytest.mark.parametrize("kwargs, field", [
    (dict(gamma1=-1.0, gamma2=1.0, coupling=1.0, pump_rate=1.0), "gamma1"),
    (dict(gamma1=1.0, gamma2=0.0, coupling=1.0, pump_rate=1.0), "gamma2"),
    (dict(gamma1=1.0, gamma2=1.0, coupling=1.0, pump_rate=-1.0), "pump_rate"),
    (dict(gamma1=1.0, gamma2=1.0, coupling=1.0, pump_rate=1.0, pump_statistic=1.5), "statistic"),
    (dict(gamma1=math.nan, gamma2=1.0, coupling=1.0, pump_rate=1.0), "gamma1"),
])
def test_active_medium_validation(kwargs, field):
    with pytest.raises(ParameterError, match=field):
        ActiveMedium(**kwargs)


@pytest.mark.parametrize("s", [0.0, 1.0])
def test_pump_statistic_endpoints_allowed(s):
    assert ActiveMedium(1.0, 1.0, 1.0, 1.0, s).pump_statistic == s


def test_cavity_and_injection_validation():
    with pytest.raises(ParameterError):
        CavityField(0.0)
    with pytest.raises(ParameterError):
        Injection(-1.0, 0.0)
    with pytest.raises(ParameterError):
        Injection(1.0, 2 * math.pi)
    assert CavityField(2.0).n_in == 0.0
    inj = Injection(4.0, math.pi / 2)
    assert inj.amplitude == pytest.approx(2j)


@given(g=rates, G1=rates, G2=rates, gp=rates, y1=rates, y2=rates, R=rates, Rp=rates,
       kappa=rates)
def test_constants_match_recomputation(g, G1, G2, gp, y1, y2, R, Rp, kappa):
    c = derive_constants(system(g, G1, G2, R, gp, y1, y2, Rp, kappa))
    beta, beta_p = 4 * g * g / (G1 * G2), 4 * gp * gp / (y1 * y2)
    assert c.beta == pytest.approx(beta, rel=1e-14)
    assert c.beta_p == pytest.approx(beta_p, rel=1e-14)
    assert c.gain_A == pytest.approx(beta * R, rel=1e-14)
    assert c.loss_Ap == pytest.approx(beta_p * Rp, rel=1e-14)
    assert c.cooperativity == pytest.approx(beta_p * Rp / kappa, rel=1e-14)


@given(c=st.floats(1e-3, 1e3))
def test_beta_scales_with_coupling_squared(c):
    b0 = ActiveMedium(3.0, 0.5, 1.2, 1.0).beta
    b1 = ActiveMedium(3.0, 0.5, 1.2 * c, 1.0).beta
    assert b1 == pytest.approx(c * c * b0, rel=1e-13)


def test_saturation_parameters():
    s = system(g=math.sqrt(1.0), gp=math.sqrt(2.0))
    assert derive_constants(s).beta_p == pytest.approx(2.0)
    assert saturation_parameters(make_point(s, 0.0, "trivial")) == (0.0, 0.0)
    I, I_p = saturation_parameters(make_point(s, 3.0))
    assert I == pytest.approx(3.0) and I_p == pytest.approx(6.0)


@given(n=st.floats(0, 1e9), k=st.floats(0.1, 10))
def test_saturation_parameters_linear_in_n(n, k):
    s = system()
    I1, Ip1 = saturation_parameters(make_point(s, n))
    I2, Ip2 = saturation_parameters(make_point(s, k * n))
    assert I2 == pytest.approx(k * I1, rel=1e-13, abs=1e-300)
    assert Ip2 == pytest.approx(k * Ip1, rel=1e-13, abs=1e-300)


def test_operating_point_validation():
    with pytest.raises(ParameterError):
        OperatingPoint(-1.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        OperatingPoint(1.0, 1.0, 1.0, branch="middle")
    p = OperatingPoint(4.0, 1.0, 1.0, 0.1, "upper", math.pi)
    assert p.locked
    assert p.amplitude == pytest.approx(-2.0)
    assert not OperatingPoint(4.0, 1.0, 1.0).locked


def test_regime_flags():
    assert ActiveMedium(10.0, 1.0, 1.0, 1.0).gamma2_small
    assert not ActiveMedium(10.0, 1.01, 1.0, 1.0).gamma2_small
    assert PassiveMedium(1.0, 10.0, 1.0, 1.0).gamma1_small
    assert not PassiveMedium(2.0, 10.0, 1.0, 1.0).gamma1_small
    s = system(G1=100.0, G2=100.0, y1=100.0, y2=100.0)
    assert s.adiabatic_valid
    assert not system(G1=99.0, G2=100.0, y1=100.0, y2=100.0).adiabatic_valid


def test_check_regime_warns():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        check_regime(system())
    messages = [str(w.message) for w in rec if issubclass(w.category, RegimeWarning)]
    assert any("Gamma_2" in m for m in messages)
    assert any("gamma_1" in m for m in messages)
    assert any("adiabatic" in m for m in messages)


def test_symbol_table_complete():
    wanted = {"kappa", "beta", "beta_p", "A", "A_p", "R", "R_p", "s", "n_tilde", "I", "I_p",
              "mu", "phi_in", "n_in", "omega"}
    assert set(model.SYMBOLS) == wanted
    import salaser.noise_spectra as ns

    owners = {"CavityField": CavityField, "DerivedConstants": model.DerivedConstants,
              "ActiveMedium": ActiveMedium, "PassiveMedium": PassiveMedium,
              "OperatingPoint": OperatingPoint, "Injection": Injection,
              "SpectrumSeries": ns.SpectrumSeries}
    locations = list(model.SYMBOLS.values())
    assert len(set(locations)) == len(locations)
    for loc in locations:
        cls, attr = loc.split(".")
        fields = getattr(owners[cls], "__dataclass_fields__")
        assert attr in fields, loc


def test_normalized_preserves_dimensionless_quantities():
    s = design_system(kappa=7.0, beta=1e-3, beta_p=2e-3, n_tilde=500.0, loss_Ap=3.0)
    sn = s.normalized()
    c, cn = derive_constants(s), derive_constants(sn)
    assert sn.kappa == 1.0
    assert cn.beta == pytest.approx(c.beta)
    assert cn.beta_p == pytest.approx(c.beta_p)
    assert cn.cooperativity == pytest.approx(c.cooperativity)
    assert cn.gain_A == pytest.approx(c.gain_A / 7.0)


@given(beta=st.floats(1e-6, 1), ratio=st.floats(0.01, 100), n=st.floats(1e-2, 1e8),
       coop=st.floats(0, 10), mu=st.floats(0, 0.05))
@settings(max_examples=50)
def test_design_system_is_stationary(beta, ratio, n, coop, mu):
    s = design_system(beta=beta, beta_p=beta * ratio, n_tilde=n, loss_Ap=coop, mu=mu)
    c = derive_constants(s)
    assert c.beta == pytest.approx(beta, rel=1e-12)
    lhs = s.kappa * (1 - mu)
    assert float(s.gain(n)) == pytest.approx(lhs, rel=1e-9, abs=1e-12)
    assert s.cavity.n_in == pytest.approx(mu * mu * n, rel=1e-12)


def test_with_injection_roundtrip():
    s = design_system(beta=1e-3, beta_p=1e-3, n_tilde=1e3)
    si = s.with_injection(2.0, 0.5)
    assert si.injected and si.cavity.phi_in == 0.5
    assert not si.with_injection(0.0).injected
    assert np.isclose(s.gain(np.array([0.0, 1.0])), [derive_constants(s).gain_A,
                                                     s.gain(1.0)]).all()
