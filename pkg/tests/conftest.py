import math

import pytest

from pcpsim import RayleighSpeed, Static, SystemConfig

NOISELESS = float("inf")  # dB; zero noise variance


def make_config(**overrides) -> SystemConfig:
    """Baseline configuration with per-test overrides."""
    defaults = dict(
        num_nodes=5,
        num_oac_symbols=101,
        cfo_var=1000.0,
        mobility=RayleighSpeed(1.5),
        snr_ue=30.0,
        snr_bs=30.0,
    )
    defaults.update(overrides)
    return SystemConfig(**defaults)


def quiet_config(**overrides) -> SystemConfig:
    """No noise, no CFO, no mobility unless overridden."""
    defaults = dict(
        cfo_var=0.0,
        mobility=Static(),
        snr_ue=NOISELESS,
        snr_bs=NOISELESS,
    )
    defaults.update(overrides)
    return make_config(**defaults)


@pytest.fixture
def baseline():
    return make_config()


def deg(x: float) -> float:
    return math.degrees(x)
