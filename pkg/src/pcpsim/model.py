"""Configuration and per-node realization types shared by the whole toolkit.

All angles are radians and all durations are seconds unless a field comment
says otherwise.  Node indices are 1-based everywhere (k = 1..K); k = 1 is the
first node to respond in the uplink and therefore the worst node in terms of
round-trip lag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s

# Baseline waveform timing: 60 kHz subcarrier spacing, CP = T_ofdm / 8,
# so T_s = T_ofdm + T_cp = 18.75 us.  One packet per symbol (T_p = T_s).
DEFAULT_OFDM_DUR = 1.0 / 60000.0  # s
DEFAULT_CP_DUR = DEFAULT_OFDM_DUR / 8.0  # s


@dataclass(frozen=True)
class FixedSpeed:
    """Every node moves at the same constant speed."""

    v: float  # m/s


@dataclass(frozen=True)
class RayleighSpeed:
    """Node speeds drawn i.i.d. from a Rayleigh distribution with mean v_mean."""

    v_mean: float  # m/s


@dataclass(frozen=True)
class Static:
    """No mobility; behaves exactly like FixedSpeed(0)."""


MobilityModel = FixedSpeed | RayleighSpeed | Static


def mobility_is_static(mobility: MobilityModel) -> bool:
    """True when the model produces zero Doppler for every node."""
    if isinstance(mobility, Static):
        return True
    if isinstance(mobility, FixedSpeed):
        return mobility.v == 0.0
    return isinstance(mobility, RayleighSpeed) and mobility.v_mean == 0.0


@dataclass(frozen=True)
class SystemConfig:
    """All protocol, waveform, and impairment parameters.

    ``symbol_dur`` and ``packet_dur`` may be omitted; construction derives
    ``symbol_dur = ofdm_dur + cp_dur`` and ``packet_dur = symbol_dur``.
    Supplying an inconsistent symbol_dur is reported by :func:`validate`.
    """

    num_nodes: int = 5  # K
    num_oac_symbols: int = 100  # M, symbols in the aggregation phase
    carrier_freq: float = 1.8e9  # Hz
    guard_ul: float = 16e-6  # s, minimum node response time g_u
    guard_dl: float = 16e-6  # s, BS response time g_d
    ofdm_dur: float = DEFAULT_OFDM_DUR  # s
    cp_dur: float = DEFAULT_CP_DUR  # s
    symbol_dur: float | None = None  # s, ofdm_dur + cp_dur
    packet_dur: float | None = None  # s, per-step packet length T_p
    theta_desired: float = 0.0  # rad, target angle at the BS
    snr_ue: float = 30.0  # dB at the node receiver (downlink steps)
    snr_bs: float = 30.0  # dB at the BS receiver (uplink steps)
    cfo_var: float = 100.0  # Hz^2, variance of the residual CFO
    mobility: MobilityModel = field(default_factory=lambda: RayleighSpeed(0.1))
    amp_ul: float | tuple[float, ...] = 1.0  # uplink amplitude, scalar or per node
    amp_dl: float | tuple[float, ...] = 1.0  # downlink amplitude
    speed_of_light: float = SPEED_OF_LIGHT  # m/s
    quantization_bits: int = 8  # Q, bits per parameter in the digital baseline
    spectral_eff: float = 4.0  # bits/(s*Hz) of the digital baseline

    def __post_init__(self) -> None:
        if self.symbol_dur is None:
            object.__setattr__(self, "symbol_dur", self.ofdm_dur + self.cp_dur)
        if self.packet_dur is None:
            object.__setattr__(self, "packet_dur", self.symbol_dur)


@dataclass(frozen=True)
class NodeRealization:
    """One node's drawn impairments for a single protocol execution."""

    index: int  # 1-based node id
    cfo: float  # Hz, residual carrier frequency offset f_k
    po: float  # rad, oscillator phase offset, in [0, 2*pi)
    speed: float  # m/s
    path_angle: float  # rad, direction of motion relative to the BS, in [0, 2*pi)
    dl_init_phase: float  # rad, downlink channel phase at t = 0
    ul_init_phase: float  # rad, uplink channel phase at t = 0

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"node index must be >= 1, got {self.index}")
        if not math.isfinite(self.cfo):
            raise ValueError("cfo must be finite")
        if self.speed < 0:
            raise ValueError("speed must be >= 0")
        if not 0.0 <= self.po < 2 * math.pi:
            raise ValueError("po must lie in [0, 2*pi)")
        if not 0.0 <= self.path_angle < 2 * math.pi:
            raise ValueError("path_angle must lie in [0, 2*pi)")


@dataclass(frozen=True, eq=False)
class ParameterVector:
    """Per-node complex parameters s[k, m], shape (K, M)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError("parameter array must be 2-D (num_nodes, num_symbols)")
        if not np.isfinite(arr).all():
            raise ValueError("parameters must be finite")
        object.__setattr__(self, "values", arr)

    @classmethod
    def unit(cls, num_nodes: int, num_symbols: int) -> "ParameterVector":
        """All-ones parameters, the coherent-gain test pattern."""
        return cls(np.ones((num_nodes, num_symbols), dtype=np.complex128))


@dataclass(frozen=True)
class PilotSymbol:
    """Unit-modulus pilot; the modulus is checked to 1e-12."""

    value: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        if abs(abs(self.value) - 1.0) > 1e-12:
            raise ValueError(f"pilot must have unit modulus, got |p| = {abs(self.value)}")


def snr_db_to_noise_var(snr_db: float) -> float:
    """Noise variance for a unit-power signal at the given SNR: 10^(-snr/10)."""
    return 10.0 ** (-snr_db / 10.0)


def wavelength(config: SystemConfig) -> float:
    """Carrier wavelength c / f_c in meters."""
    return config.speed_of_light / config.carrier_freq


def node_amp(amp: float | tuple[float, ...], k: int) -> float:
    """Amplitude for 1-based node k; scalar amplitudes apply to every node."""
    if isinstance(amp, (int, float)):
        return float(amp)
    return float(amp[k - 1])


def validate(config: SystemConfig) -> list[str]:
    """Collect every violated invariant as a human-readable message.

    Returns an empty list when the configuration is usable.  Reports rather
    than raises so a CLI can enumerate all problems at once.
    """
    errors: list[str] = []
    if config.num_nodes < 1:
        errors.append(f"num_nodes must be >= 1, got {config.num_nodes}")
    if config.num_oac_symbols < 1:
        errors.append(f"num_oac_symbols must be >= 1, got {config.num_oac_symbols}")
    for name in ("guard_ul", "guard_dl", "packet_dur", "ofdm_dur", "cp_dur", "symbol_dur"):
        value = getattr(config, name)
        if not (value > 0 and math.isfinite(value)):
            errors.append(f"{name} must be a positive duration, got {value}")
    if config.symbol_dur is not None and math.isfinite(config.symbol_dur):
        expected = config.ofdm_dur + config.cp_dur
        if not math.isclose(config.symbol_dur, expected, rel_tol=1e-12):
            errors.append(
                f"symbol_dur must equal ofdm_dur + cp_dur = {expected!r}, "
                f"got {config.symbol_dur!r}"
            )
    if not config.cfo_var >= 0:
        errors.append(f"cfo_var must be >= 0, got {config.cfo_var}")
    for name in ("amp_ul", "amp_dl"):
        amp = getattr(config, name)
        values = (amp,) if isinstance(amp, (int, float)) else tuple(amp)
        if not isinstance(amp, (int, float)) and len(values) != config.num_nodes:
            errors.append(f"{name} must list one amplitude per node")
        if any(not (a > 0 and math.isfinite(a)) for a in values):
            errors.append(f"{name} amplitudes must be positive, got {amp}")
    if not (config.carrier_freq > 0 and math.isfinite(config.carrier_freq)):
        errors.append(f"carrier_freq must be positive, got {config.carrier_freq}")
    if not (config.speed_of_light > 0 and math.isfinite(config.speed_of_light)):
        errors.append(f"speed_of_light must be positive, got {config.speed_of_light}")
    if config.carrier_freq > 0 and config.speed_of_light > 0:
        lam = wavelength(config)
        if not (lam > 0 and math.isfinite(lam)):
            errors.append(f"wavelength must be finite and positive, got {lam}")
    if isinstance(config.mobility, FixedSpeed) and config.mobility.v < 0:
        errors.append(f"mobility speed must be >= 0, got {config.mobility.v}")
    if isinstance(config.mobility, RayleighSpeed) and config.mobility.v_mean < 0:
        errors.append(f"mobility mean speed must be >= 0, got {config.mobility.v_mean}")
    for name in ("snr_ue", "snr_bs"):
        value = getattr(config, name)
        if math.isnan(value):
            errors.append(f"{name} must not be NaN")
    if not math.isfinite(config.theta_desired):
        errors.append(f"theta_desired must be finite, got {config.theta_desired}")
    if config.quantization_bits < 1:
        errors.append(f"quantization_bits must be >= 1, got {config.quantization_bits}")
    if not (config.spectral_eff > 0 and math.isfinite(config.spectral_eff)):
        errors.append(f"spectral_eff must be positive, got {config.spectral_eff}")
    return errors
