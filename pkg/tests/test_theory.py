import math

import numpy as np
import pytest

from pcpsim import (
    FixedSpeed,
    RayleighSpeed,
    Static,
    cdf_abs_deviation,
    rate_oac,
    rate_traditional,
    rmse_theory,
    round_trip_lag,
    var_cfo,
    var_mob_fixed,
    var_mob_rayleigh,
    var_noise,
)

from conftest import make_config, quiet_config

TS = 18.75e-6
GU = GD = 16e-6
LAM6 = 1 / 6  # wavelength for a 3e8 m/s light speed at 1.8 GHz


class TestVarCfo:
    def test_first_symbol(self):
        assert var_cfo(0, TS, 1000.0) == 0.0

    def test_reference_values(self):
        assert math.isclose(var_cfo(100, TS, 1000.0), 0.13879131189031904, rel_tol=1e-12)
        assert math.isclose(var_cfo(20, TS, 1000.0), 5.551652475612763e-3, rel_tol=1e-12)

    def test_scales_with_m_squared(self):
        assert math.isclose(var_cfo(40, TS, 100.0), 4 * var_cfo(20, TS, 100.0), rel_tol=1e-12)

    def test_negative_m_rejected(self):
        with pytest.raises(ValueError):
            var_cfo(-1, TS, 100.0)


class TestVarNoise:
    def test_equal_snrs(self):
        assert math.isclose(var_noise(1e-3, 1e-3), 1.5e-3, rel_tol=1e-12)

    def test_asymmetric_snrs(self):
        assert math.isclose(var_noise(0.1, 0.01), 0.06, rel_tol=1e-12)

    def test_zero_noise(self):
        assert var_noise(0.0, 0.0) == 0.0

    def test_amplitude_flag_coincides_at_unit(self):
        assert var_noise(0.1, 0.01) == var_noise(0.1, 0.01, squared_amplitude=True)

    def test_amplitude_flag_differs_otherwise(self):
        first = var_noise(0.1, 0.01, a_ul_t2=2.0, a_dl_t3=2.0, a_dl_t1=2.0)
        second = var_noise(0.1, 0.01, a_ul_t2=2.0, a_dl_t3=2.0, a_dl_t1=2.0,
                           squared_amplitude=True)
        assert math.isclose(first, 0.03, rel_tol=1e-12)
        assert math.isclose(second, 0.015, rel_tol=1e-12)


class TestVarMob:
    def test_zero_speed(self):
        assert var_mob_fixed(0.0, LAM6, 1, 20, 10, GU, GD, TS, TS) == 0.0
        assert var_mob_rayleigh(0.0, LAM6, 1, 20, 10, GU, GD, TS, TS) == 0.0

    def test_fixed_equals_half_peak_squared(self):
        # Second moment of cos over a uniform angle: (1/2) * (2*pi*v*tau/lam)^2.
        v = 1.5
        tau = round_trip_lag(1, 20, 0, GU, GD, TS, TS)
        expected = 0.5 * (2 * math.pi * v * tau / LAM6) ** 2
        assert math.isclose(var_mob_fixed(v, LAM6, 1, 20, 0, GU, GD, TS, TS),
                            expected, rel_tol=1e-12)

    def test_fixed_reference_value(self):
        got = var_mob_fixed(1.5, LAM6, 1, 20, 0, GU, GD, TS, TS)
        assert math.isclose(got, 3.911003975228106e-3, rel_tol=1e-12)
        assert math.isclose(round_trip_lag(1, 20, 0, GU, GD, TS, TS), 1.564e-3, rel_tol=1e-12)

    def test_rayleigh_reference_value(self):
        got = var_mob_rayleigh(1.5, LAM6, 1, 20, 20, GU, GD, TS, TS)
        assert math.isclose(got, 7.653859693799429e-3, rel_tol=1e-12)
        assert math.isclose(round_trip_lag(1, 20, 20, GU, GD, TS, TS), 1.939e-3, rel_tol=1e-12)

    def test_rayleigh_to_fixed_ratio(self):
        fixed = var_mob_fixed(0.8, LAM6, 2, 10, 30, GU, GD, TS, TS)
        rayleigh = var_mob_rayleigh(0.8, LAM6, 2, 10, 30, GU, GD, TS, TS)
        assert math.isclose(rayleigh / fixed, 4 / math.pi, rel_tol=1e-12)

    def test_node_index_bounds(self):
        with pytest.raises(ValueError):
            var_mob_fixed(1.0, LAM6, 0, 5, 0, GU, GD, TS, TS)
        with pytest.raises(ValueError):
            var_mob_rayleigh(1.0, LAM6, 6, 5, 0, GU, GD, TS, TS)

    def test_gaussian_reduction_monte_carlo(self):
        # Rayleigh speed times cos(uniform angle) is Gaussian with variance
        # 2*v_mean^2/pi; the simulated variance of the mobility deviation
        # must match the closed form within 1%.
        v_mean = 1.5
        tau = round_trip_lag(1, 20, 20, GU, GD, TS, TS)
        rng = np.random.default_rng(12)
        v = rng.rayleigh(v_mean * math.sqrt(2 / math.pi), 1_000_000)
        alpha = rng.uniform(0, 2 * math.pi, 1_000_000)
        eps = 2 * math.pi * v * np.cos(alpha) * tau / LAM6
        expected = var_mob_rayleigh(v_mean, LAM6, 1, 20, 20, GU, GD, TS, TS)
        assert abs(np.var(eps) - expected) / expected < 0.01


class TestRmseTheory:
    def test_no_impairments(self):
        cfg = quiet_config()
        vb = rmse_theory(1, 50, cfg)
        assert vb.sigma == 0.0

    def test_reference_m20(self):
        cfg = make_config(num_nodes=20)
        vb = rmse_theory(1, 20, cfg)
        assert math.isclose(vb.sigma, 0.1213, rel_tol=2e-3)
        assert math.isclose(math.degrees(vb.sigma), 6.95, rel_tol=2e-3)

    def test_reference_m100(self):
        cfg = make_config(num_nodes=20)
        vb = rmse_theory(1, 100, cfg)
        assert math.isclose(vb.sigma, 0.4054, rel_tol=2e-3)
        assert math.isclose(math.degrees(vb.sigma), 23.2, rel_tol=3e-3)

    def test_breakdown_sums_to_sigma_squared(self):
        cfg = make_config(num_nodes=20)
        vb = rmse_theory(1, 20, cfg)
        assert math.isclose(vb.sigma**2, vb.var_cfo + vb.var_noise + vb.var_mob,
                            rel_tol=1e-12)
        assert vb.var_cfo >= 0 and vb.var_noise >= 0 and vb.var_mob >= 0

    def test_nondecreasing_in_m(self):
        cfg = make_config(num_nodes=20)
        sigmas = [rmse_theory(1, m, cfg).sigma for m in range(0, 101, 5)]
        assert all(a <= b for a, b in zip(sigmas, sigmas[1:]))

    def test_nonincreasing_in_k(self):
        cfg = make_config(num_nodes=20)
        sigmas = [rmse_theory(k, 40, cfg).sigma for k in range(1, 21)]
        assert all(a >= b for a, b in zip(sigmas, sigmas[1:]))

    def test_cfo_component_independent_of_k_and_num_nodes(self):
        values = {rmse_theory(1, 60, make_config(num_nodes=K)).var_cfo for K in (1, 5, 100)}
        assert len(values) == 1

    def test_mobility_dispatch(self):
        fixed = rmse_theory(1, 10, make_config(mobility=FixedSpeed(1.5)))
        rayleigh = rmse_theory(1, 10, make_config(mobility=RayleighSpeed(1.5)))
        static = rmse_theory(1, 10, make_config(mobility=Static()))
        assert static.var_mob == 0.0
        assert math.isclose(rayleigh.var_mob / fixed.var_mob, 4 / math.pi, rel_tol=1e-12)
        assert rmse_theory(1, 10, make_config(mobility=FixedSpeed(0.0))).var_mob == 0.0


class TestCdf:
    def test_zero_threshold(self):
        assert cdf_abs_deviation(0.0, 0.3) == 0.0

    def test_large_threshold(self):
        assert cdf_abs_deviation(100.0, 0.3) > 1 - 1e-12

    def test_reference_value(self):
        got = cdf_abs_deviation(math.radians(15), 0.4054)
        assert math.isclose(got, 0.481, abs_tol=1e-3)
        assert math.isclose(got, 0.48157843868237116, rel_tol=1e-12)

    def test_zero_sigma_step(self):
        assert cdf_abs_deviation(0.0, 0.0) == 0.0
        assert cdf_abs_deviation(1e-9, 0.0) == 1.0

    def test_monotone_in_theta_and_sigma(self):
        thetas = np.linspace(0.01, 1.5, 40)
        values = [cdf_abs_deviation(t, 0.4) for t in thetas]
        assert all(a < b for a, b in zip(values, values[1:]))
        sigmas = np.linspace(0.05, 2.0, 40)
        values = [cdf_abs_deviation(0.3, s) for s in sigmas]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_negative_arguments_rejected(self):
        with pytest.raises(ValueError):
            cdf_abs_deviation(-0.1, 0.3)
        with pytest.raises(ValueError):
            cdf_abs_deviation(0.1, -0.3)


class TestRates:
    T_OFDM = 1 / 60000

    def test_single_symbol(self):
        got = rate_oac(1, 5, self.T_OFDM, TS, TS, GU, GD)
        assert math.isclose(got, 0.06105006105006105, rel_tol=1e-12)

    def test_hundred_symbols(self):
        got = rate_oac(100, 5, self.T_OFDM, TS, TS, GU, GD)
        assert math.isclose(got, 0.7827482290321318, rel_tol=1e-12)

    def test_monotone_and_bounded(self):
        rates = [rate_oac(M, 5, self.T_OFDM, TS, TS, GU, GD) for M in range(1, 2001, 20)]
        assert all(a < b for a, b in zip(rates, rates[1:]))
        assert all(r < self.T_OFDM / TS for r in rates)  # 8/9 asymptote

    def test_traditional_reference(self):
        assert rate_traditional(4.0, 8, 5) == 0.1
        assert rate_traditional(4.0, 8, 20) == 0.025

    def test_traditional_halves_when_k_doubles(self):
        assert rate_traditional(4.0, 8, 10) == rate_traditional(4.0, 8, 5) / 2

    def test_crossover(self):
        oac = rate_oac(100, 5, self.T_OFDM, TS, TS, GU, GD)
        assert oac > rate_traditional(4.0, 8, 5)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            rate_oac(0, 5, self.T_OFDM, TS, TS, GU, GD)
        with pytest.raises(ValueError):
            rate_traditional(4.0, 0, 5)
