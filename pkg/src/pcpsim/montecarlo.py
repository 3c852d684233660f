"""Repeated randomized protocol executions with theory comparison.

Reproducibility rule: trial i draws everything it needs from its own
generator ``np.random.default_rng([base_seed, i])``, in a fixed order
(realization draws, then the three handshake noise vectors).  Results are
therefore independent of how trials are scheduled, and two runs with the
same plan are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import protocol
from .model import (
    FixedSpeed,
    NodeRealization,
    RayleighSpeed,
    Static,
    SystemConfig,
    validate,
)
from .channel import wrap_phase
from .theory import VarianceBreakdown, cdf_abs_deviation, rmse_theory

DEFAULT_TRIALS = 100_000  # acceptance-grade runs; smoke tests use ~1e3


@dataclass(frozen=True)
class TrialPlan:
    """What to simulate and which (k, m) cells to record."""

    n_trials: int = DEFAULT_TRIALS
    base_seed: int = 0
    record_breakdown: bool = False
    nodes_of_interest: tuple[int, ...] = (1,)
    symbols_of_interest: tuple[int, ...] | None = None  # None: decade grid over [0, M)


@dataclass(frozen=True, eq=False)
class DeviationStats:
    """Empirical deviation statistics on the plan's (k, m) grid.

    Arrays are indexed [node cell, symbol cell] following ``nodes`` and
    ``symbols``; ``cdf_samples`` holds the sorted absolute deviations of
    every trial.  ``theory`` is the matching closed-form grid.
    """

    nodes: tuple[int, ...]
    symbols: tuple[int, ...]
    n: int
    rmse_emp: np.ndarray
    cdf_samples: np.ndarray
    theory: list[list[VarianceBreakdown]]
    rms_cfo: np.ndarray | None = None
    rms_mob: np.ndarray | None = None
    rms_noise: np.ndarray | None = None

    def sigma_theory(self) -> np.ndarray:
        return np.array([[cell.sigma for cell in row] for row in self.theory])


def default_symbols(num_oac_symbols: int) -> tuple[int, ...]:
    """A decade grid over [0, M) plus the final symbol."""
    step = max(1, num_oac_symbols // 10)
    grid = set(range(0, num_oac_symbols, step))
    grid.add(num_oac_symbols - 1)
    return tuple(sorted(grid))


def validate_plan(plan: TrialPlan, config: SystemConfig) -> list[str]:
    """Plan problems as human-readable messages; empty when usable."""
    errors = []
    if plan.n_trials < 1:
        errors.append(f"n_trials must be >= 1, got {plan.n_trials}")
    if plan.base_seed < 0:
        errors.append(f"base_seed must be a non-negative integer, got {plan.base_seed}")
    for k in plan.nodes_of_interest:
        if not 1 <= k <= config.num_nodes:
            errors.append(f"node of interest {k} outside [1, {config.num_nodes}]")
    if plan.symbols_of_interest is not None:
        for m in plan.symbols_of_interest:
            if not 0 <= m < config.num_oac_symbols:
                errors.append(
                    f"symbol of interest {m} outside [0, {config.num_oac_symbols})"
                )
    if not plan.nodes_of_interest:
        errors.append("nodes_of_interest must not be empty")
    if plan.symbols_of_interest is not None and not plan.symbols_of_interest:
        errors.append("symbols_of_interest must not be empty")
    return errors


def _draw_arrays(config: SystemConfig, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Impairment draws for all K nodes, in the documented stream order."""
    K = config.num_nodes
    two_pi = 2.0 * np.pi
    arrays = {
        "cfo": rng.normal(0.0, math.sqrt(config.cfo_var), K),
        "po": rng.uniform(0.0, two_pi, K),
        "path_angle": rng.uniform(0.0, two_pi, K),
        "dl_init": rng.uniform(0.0, two_pi, K),
        "ul_init": rng.uniform(0.0, two_pi, K),
    }
    mob = config.mobility
    if isinstance(mob, RayleighSpeed):
        arrays["speed"] = rng.rayleigh(mob.v_mean * math.sqrt(2.0 / math.pi), K)
    elif isinstance(mob, FixedSpeed):
        arrays["speed"] = np.full(K, float(mob.v))
    elif isinstance(mob, Static):
        arrays["speed"] = np.zeros(K)
    else:
        raise TypeError(f"unknown mobility model: {mob!r}")
    return arrays


def draw_realization(config: SystemConfig, rng: np.random.Generator) -> list[NodeRealization]:
    """One random impairment draw per node (CFO, PO, path angle, link phases, speed)."""
    a = _draw_arrays(config, rng)
    return [
        NodeRealization(
            index=k + 1,
            cfo=float(a["cfo"][k]),
            po=float(a["po"][k]),
            speed=float(a["speed"][k]),
            path_angle=float(a["path_angle"][k]),
            dl_init_phase=float(a["dl_init"][k]),
            ul_init_phase=float(a["ul_init"][k]),
        )
        for k in range(config.num_nodes)
    ]


def trial_rng(base_seed: int, trial_index: int) -> np.random.Generator:
    """The per-trial stream: numpy's SeedSequence over (base_seed, trial index)."""
    return np.random.default_rng([base_seed, trial_index])


def run_trials(config: SystemConfig, plan: TrialPlan) -> DeviationStats:
    """Run the full pipeline plan.n_trials times and aggregate deviations.

    Every trial draws a fresh realization, executes the handshake with
    noise, and measures the noiseless per-node deviations of the requested
    aggregation symbols.  Aggregation is in trial order, so the output is a
    pure function of (config, plan).
    """
    problems = validate(config) + validate_plan(plan, config)
    if problems:
        raise ValueError("cannot run trials: " + "; ".join(problems))

    symbols = (
        tuple(plan.symbols_of_interest)
        if plan.symbols_of_interest is not None
        else default_symbols(config.num_oac_symbols)
    )
    nodes_idx = np.array([k - 1 for k in plan.nodes_of_interest], dtype=np.intp)
    m_arr = np.array(symbols, dtype=np.float64)
    schedule = protocol.build_schedule(config)
    pilot = 1.0 + 0.0j

    shape = (len(plan.nodes_of_interest), len(symbols))
    sumsq = np.zeros(shape)
    samples = np.empty((*shape, plan.n_trials))
    sumsq_cfo = np.zeros(shape) if plan.record_breakdown else None
    sumsq_mob = np.zeros(shape) if plan.record_breakdown else None
    sumsq_noise = np.zeros(shape) if plan.record_breakdown else None

    for i in range(plan.n_trials):
        rng = trial_rng(plan.base_seed, i)
        arrays = _draw_arrays(config, rng)
        _, _, psi3 = protocol._sync_arrays(config, arrays, schedule, rng, pilot)
        dev = protocol._oac_deviation_arrays(config, arrays, schedule, psi3, m_arr)
        dev = dev[nodes_idx, :]
        if not np.isfinite(dev).all():
            raise ArithmeticError(
                f"trial {i} produced a non-finite deviation; aborting run"
            )
        sumsq += dev**2
        samples[:, :, i] = np.abs(dev)
        if plan.record_breakdown:
            eps_cfo, eps_mob = protocol._decompose_arrays(
                arrays["cfo"], arrays["speed"], arrays["path_angle"],
                schedule, m_arr, config.symbol_dur,
                config.speed_of_light / config.carrier_freq,
            )
            eps_cfo = eps_cfo[nodes_idx, :]
            eps_mob = eps_mob[nodes_idx, :]
            sumsq_cfo += eps_cfo**2
            sumsq_mob += eps_mob**2
            sumsq_noise += wrap_phase(dev - eps_cfo - eps_mob) ** 2

    samples.sort(axis=2)
    theory_grid = [
        [rmse_theory(k, m, config) for m in symbols] for k in plan.nodes_of_interest
    ]
    n = plan.n_trials

    def rms(acc):
        return None if acc is None else np.sqrt(acc / n)

    return DeviationStats(
        nodes=tuple(plan.nodes_of_interest),
        symbols=symbols,
        n=n,
        rmse_emp=np.sqrt(sumsq / n),
        cdf_samples=samples,
        theory=theory_grid,
        rms_cfo=rms(sumsq_cfo),
        rms_mob=rms(sumsq_mob),
        rms_noise=rms(sumsq_noise),
    )


def empirical_cdf(samples: np.ndarray, theta_grid: np.ndarray) -> np.ndarray:
    """Right-continuous empirical CDF of sorted samples on a theta grid."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("cannot build an empirical CDF from zero samples")
    counts = np.searchsorted(samples, np.asarray(theta_grid), side="right")
    return counts / samples.size


def ks_distance(samples: np.ndarray, sigma: float) -> float:
    """Kolmogorov-Smirnov distance between |deviation| samples and the analytic CDF.

    Valid for the Rayleigh-speed (Gaussian-deviation) model only; sigma must
    be positive.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    s = np.sort(np.asarray(samples, dtype=np.float64))
    if s.size == 0:
        raise ValueError("cannot compute a KS distance from zero samples")
    n = s.size
    analytic = np.array([cdf_abs_deviation(float(x), sigma) for x in s])
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(max(np.max(np.abs(upper - analytic)), np.max(np.abs(lower - analytic))))
