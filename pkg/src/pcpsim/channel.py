"""Uplink/downlink impairment chain at the per-symbol level.

The channel applies three phase terms to each complex symbol: the link phase
(initial phase plus a Doppler ramp), the oscillator rotation 2*pi*f_k*t + po,
and additive circularly-symmetric complex Gaussian noise.  The oscillator
term enters with opposite signs on the two links: positive in the downlink,
negative in the uplink.

Phases are kept unwrapped here; wrapping happens only where an angle is
actually estimated or reported.  All helpers broadcast over numpy arrays, so
the same formulas serve both the scalar per-node contract and the vectorized
Monte Carlo path.
"""

from __future__ import annotations

import numpy as np

from .model import NodeRealization

TWO_PI = 2.0 * np.pi


def wrap_phase(x):
    """Wrap an angle (scalar or array) to the interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - x, TWO_PI)


def doppler_phase(speed, path_angle, t, lam):
    """Phase accumulated by motion: 2*pi*t*v*cos(alpha)/lambda."""
    return TWO_PI * t * speed * np.cos(path_angle) / lam


def oscillator_phase(cfo, po, t):
    """CFO/PO rotation 2*pi*f*t + po (applied with +/- sign per link)."""
    return TWO_PI * cfo * t + po


def complex_noise(rng: np.random.Generator, noise_var: float, size=None):
    """Circularly-symmetric complex Gaussian with total variance noise_var.

    Each quadrature carries noise_var / 2.  A zero variance draws nothing
    from the stream and returns exact zeros.
    """
    if noise_var < 0:
        raise ValueError(f"noise_var must be >= 0, got {noise_var}")
    if noise_var == 0.0:
        return 0.0 + 0.0j if size is None else np.zeros(size, dtype=np.complex128)
    scale = np.sqrt(noise_var / 2.0)
    if size is None:
        re, im = rng.standard_normal(2)
        return complex(re * scale, im * scale)
    w = rng.standard_normal((*np.atleast_1d(size), 2))
    return (w[..., 0] + 1j * w[..., 1]) * scale


def dl_phase(node: NodeRealization, t, lam: float):
    """Downlink channel phase at time t (unwrapped)."""
    return node.dl_init_phase + doppler_phase(node.speed, node.path_angle, t, lam)


def ul_phase(node: NodeRealization, t, lam: float):
    """Uplink channel phase at time t; same Doppler ramp, own initial phase."""
    return node.ul_init_phase + doppler_phase(node.speed, node.path_angle, t, lam)


def dl_receive(
    node: NodeRealization,
    t: float,
    x: complex,
    noise_var: float,
    rng: np.random.Generator,
    lam: float,
    a_dl: float = 1.0,
) -> complex:
    """Symbol received by the node: a_dl * e^{j(theta_dl + 2*pi*f*t + po)} * x + w."""
    phase = dl_phase(node, t, lam) + oscillator_phase(node.cfo, node.po, t)
    return a_dl * np.exp(1j * phase) * x + complex_noise(rng, noise_var)


def ul_receive(
    node: NodeRealization,
    t: float,
    x: complex,
    noise_var: float,
    rng: np.random.Generator,
    lam: float,
    a_ul: float = 1.0,
) -> complex:
    """Symbol received by the BS: a_ul * e^{j(theta_ul - 2*pi*f*t - po)} * x + w."""
    phase = ul_phase(node, t, lam) - oscillator_phase(node.cfo, node.po, t)
    return a_ul * np.exp(1j * phase) * x + complex_noise(rng, noise_var)
