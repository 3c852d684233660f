"""Closed-form statistics of the phase deviations.

Each deviation component is modeled as zero-mean with the variances below;
their sum gives the per-(k, m) standard deviation sigma and, for the
Rayleigh-speed mobility model, a Gaussian deviation whose absolute value has
CDF 2*Phi(theta/sigma) - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    FixedSpeed,
    MobilityModel,
    RayleighSpeed,
    Static,
    SystemConfig,
    node_amp,
    snr_db_to_noise_var,
    wavelength,
)


@dataclass(frozen=True)
class VarianceBreakdown:
    """Deviation variance split into its three sources, all in rad^2."""

    var_cfo: float
    var_noise: float
    var_mob: float

    @property
    def sigma(self) -> float:
        """Standard deviation of the total phase deviation, radians."""
        return math.sqrt(self.var_cfo + self.var_noise + self.var_mob)


def var_cfo(m: int, symbol_dur: float, cfo_var: float) -> float:
    """CFO-induced variance 4*pi^2 * m^2 * T_s^2 * sigma_cfo^2."""
    if m < 0:
        raise ValueError(f"symbol index must be >= 0, got {m}")
    return 4.0 * math.pi**2 * m**2 * symbol_dur**2 * cfo_var


def var_noise(
    noise_var_bs: float,
    noise_var_ue: float,
    a_ul_t2: float = 1.0,
    a_dl_t3: float = 1.0,
    a_dl_t1: float = 1.0,
    squared_amplitude: bool = False,
) -> float:
    """Small-noise variance of the accumulated estimation errors.

    Three receptions contribute: the BS receiver once (Step 2, uplink
    amplitude) and the node receiver twice (Steps 1 and 3, downlink
    amplitudes):

        sigma_bs^2 / (2 a_ul) + sigma_ue^2 / (2 a_dl_t3) + sigma_ue^2 / (2 a_dl_t1)

    Denominators carry the amplitude to the first power by default;
    ``squared_amplitude=True`` switches to the conventional a^2 form.  The
    two coincide at the unit amplitudes used throughout the baseline.
    """
    exp = 2 if squared_amplitude else 1
    return (
        noise_var_bs / (2.0 * a_ul_t2**exp)
        + noise_var_ue / (2.0 * a_dl_t3**exp)
        + noise_var_ue / (2.0 * a_dl_t1**exp)
    )


def round_trip_lag(
    k: int, K: int, m: int, g_u: float, g_d: float, t_p: float, t_s: float
) -> float:
    """Total time over which mobility rotates node k's m-th deviation.

    Equals 2*(g_u + g_d + (2K + 1 - k)*T_p) + m*T_s under the standard
    schedule; node k = 1 waits longest between response and feedback.
    """
    return 2.0 * (g_u + g_d + (2 * K + 1 - k) * t_p) + m * t_s


def var_mob_fixed(
    v: float, lam: float, k: int, K: int, m: int,
    g_u: float, g_d: float, t_p: float, t_s: float,
) -> float:
    """Mobility variance at fixed speed v: (2*pi^2*v^2/lambda^2) * tau^2.

    Equivalently (1/2)*(2*pi*v*tau/lambda)^2, the second moment of a cosine
    over a uniform path angle (Jakes spectrum).
    """
    if not 1 <= k <= K:
        raise ValueError(f"node index must lie in [1, {K}], got {k}")
    tau = round_trip_lag(k, K, m, g_u, g_d, t_p, t_s)
    return 2.0 * math.pi**2 * v**2 / lam**2 * tau**2


def var_mob_rayleigh(
    v_mean: float, lam: float, k: int, K: int, m: int,
    g_u: float, g_d: float, t_p: float, t_s: float,
) -> float:
    """Mobility variance for Rayleigh speeds with mean v: (8*pi*v^2/lambda^2)*tau^2.

    With speed ~ Rayleigh(mean v_mean) and a uniform path angle, the radial
    rate v*cos(alpha) is exactly Gaussian with variance 2*v_mean^2/pi, which
    yields the 8*pi coefficient (4/pi times the fixed-speed value).
    """
    if not 1 <= k <= K:
        raise ValueError(f"node index must lie in [1, {K}], got {k}")
    tau = round_trip_lag(k, K, m, g_u, g_d, t_p, t_s)
    return 8.0 * math.pi * v_mean**2 / lam**2 * tau**2


def rmse_theory(
    k: int, m: int, config: SystemConfig, squared_amplitude: bool = False
) -> VarianceBreakdown:
    """Predicted deviation breakdown for node k and symbol m."""
    lam = wavelength(config)
    v_cfo = var_cfo(m, config.symbol_dur, config.cfo_var)
    v_noise = var_noise(
        snr_db_to_noise_var(config.snr_bs),
        snr_db_to_noise_var(config.snr_ue),
        a_ul_t2=node_amp(config.amp_ul, k),
        a_dl_t3=node_amp(config.amp_dl, k),
        a_dl_t1=node_amp(config.amp_dl, k),
        squared_amplitude=squared_amplitude,
    )
    v_mob = _var_mob(config.mobility, lam, k, config.num_nodes, m, config)
    return VarianceBreakdown(var_cfo=v_cfo, var_noise=v_noise, var_mob=v_mob)


def _var_mob(
    mobility: MobilityModel, lam: float, k: int, K: int, m: int, config: SystemConfig
) -> float:
    args = (lam, k, K, m, config.guard_ul, config.guard_dl,
            config.packet_dur, config.symbol_dur)
    if isinstance(mobility, Static):
        return 0.0
    if isinstance(mobility, FixedSpeed):
        return var_mob_fixed(mobility.v, *args)
    if isinstance(mobility, RayleighSpeed):
        return var_mob_rayleigh(mobility.v_mean, *args)
    raise TypeError(f"unknown mobility model: {mobility!r}")


def cdf_abs_deviation(theta: float, sigma: float) -> float:
    """P(|deviation| <= theta) for a zero-mean Gaussian deviation.

    2*Phi(theta/sigma) - 1, evaluated through the error function.  Valid
    when every deviation component is Gaussian, i.e. for the Rayleigh-speed
    (or zero-mobility) models; the fixed-speed Jakes deviation is not
    Gaussian and has no closed-form CDF here.
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return 1.0 if theta > 0 else 0.0
    return math.erf(theta / (sigma * math.sqrt(2.0)))


def rate_oac(
    M: int, K: int, t_ofdm: float, t_s: float, t_p: float, g_u: float, g_d: float
) -> float:
    """Aggregation throughput in functions/(s*Hz).

    M functions are computed on one subcarrier in
    2*g_u + g_d + 2*(K + 1)*T_p + (M - 1)*T_s seconds.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    duration = 2.0 * g_u + g_d + 2.0 * (K + 1) * t_p + (M - 1) * t_s
    return M * t_ofdm / duration


def rate_traditional(r_eff: float, q_bits: int, K: int) -> float:
    """Throughput of collect-then-compute: r_eff / (Q * K) functions/(s*Hz)."""
    if q_bits < 1 or K < 1:
        raise ValueError("q_bits and K must be >= 1")
    return r_eff / (q_bits * K)
