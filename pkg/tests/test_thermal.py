import math

import pytest

import casimir_cone.thermal as thermal
from casimir_cone.cone import ConeConfig, cone_energy
from casimir_cone.thermal import (
    PolarizabilityModel,
    ThermalAccuracyError,
    ThermalConfig,
    kappa_decay_rate,
    static_limit_density,
    thermal_energy,
    zero_temperature_energy,
)

PI = math.pi
CFG = ConeConfig(PI / 3, 2.5)
PLANE_AXIS = ConeConfig(PI / 2, PI)


class TestModels:
    def test_static_ratio_is_one(self):
        assert PolarizabilityModel().ratio(123.0) == 1.0

    def test_oscillator_ratio(self):
        m = PolarizabilityModel("single-oscillator", omega0=2.0)
        assert m.ratio(0.0) == 1.0
        assert m.ratio(2.0) == pytest.approx(0.5)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "drude"},
            {"alpha0": 0.0},
            {"kind": "single-oscillator"},
            {"kind": "single-oscillator", "omega0": -1.0},
        ],
    )
    def test_invalid_models(self, kwargs):
        with pytest.raises(ValueError):
            PolarizabilityModel(**kwargs)

    @pytest.mark.parametrize("tau,n_max", [(-0.1, 10), (math.inf, 10), (math.nan, 10), (0.1, 0)])
    def test_invalid_config(self, tau, n_max):
        with pytest.raises(ValueError):
            ThermalConfig(tau, n_max=n_max)


class TestStaticLimit:
    def test_plane_axis_value(self):
        # g(0) = -1/(4π) for the plane seen from the axis
        g0, err, samples = static_limit_density(PLANE_AXIS)
        assert g0 == pytest.approx(-1 / (4 * PI), rel=1e-6)
        assert err < 1e-6
        assert len(samples) == 3

    def test_unstable_extrapolation_is_refused(self, monkeypatch):
        monkeypatch.setattr(thermal, "EXTRAP_LIMIT", 1e-12)
        with pytest.raises(ThermalAccuracyError) as info:
            static_limit_density(CFG)
        assert info.value.bound > 0

    def test_decay_rate(self):
        assert kappa_decay_rate(ConeConfig(1.0, 1.5)) == pytest.approx(2 * math.sin(0.5))
        assert kappa_decay_rate(PLANE_AXIS) == pytest.approx(2.0)


class TestMatsubara:
    def test_zero_tau_is_zero_temperature(self):
        assert thermal_energy(CFG, ThermalConfig(0.0)).u_hat == cone_energy(CFG).u_hat

    def test_high_temperature_dominated_by_static_term(self):
        g0, _, _ = static_limit_density(CFG)
        res = thermal_energy(CFG, ThermalConfig(3.0))
        assert res.converged
        assert 0.5 * 3.0 * g0 / res.u_hat > 0.9

    def test_plane_axis_closed_form(self):
        # τ Σ' g(nτ) with g = -(2x²+2x+1)e^{-2x}/(4π) summed exactly
        tau = 0.7
        q = math.exp(-2 * tau)
        s0 = 1 / (1 - q)
        s1 = q / (1 - q) ** 2
        s2 = q * (1 + q) / (1 - q) ** 3
        exact = -tau / (4 * PI) * (2 * tau * tau * s2 + 2 * tau * s1 + s0 - 0.5)
        res = thermal_energy(PLANE_AXIS, ThermalConfig(tau))
        assert res.u_hat == pytest.approx(exact, rel=1e-6)

    def test_oscillator_weakens_attraction(self):
        osc = PolarizabilityModel("single-oscillator", omega0=1.0)
        weak = thermal_energy(CFG, ThermalConfig(0.5, osc)).u_hat
        full = thermal_energy(CFG, ThermalConfig(0.5)).u_hat
        assert full < weak < 0

    def test_channels_reported(self):
        res = thermal_energy(PLANE_AXIS, ThermalConfig(1.0))
        assert res.electric < 0 and res.magnetic < 0 and res.ghost < 0

    def test_oscillator_zero_temperature_is_weaker(self):
        osc = PolarizabilityModel("single-oscillator", omega0=1.0)
        res = zero_temperature_energy(PLANE_AXIS, osc)
        assert cone_energy(PLANE_AXIS).u_hat < res.u_hat < 0
        assert res.electric + res.magnetic + res.ghost == pytest.approx(res.u_hat, rel=1e-12)

    @pytest.mark.slow
    def test_low_temperature_recovers_zero_temperature(self):
        res = thermal_energy(CFG, ThermalConfig(0.01))
        assert res.u_hat == pytest.approx(cone_energy(CFG).u_hat, rel=1e-2)
