"""Analog over-the-air aggregation of one scalar per device.

Devices pre-scale their values so the superposed waveform computes the
mean at the receiver; residual misalignment (devices capped by their
power budget) and receiver noise produce a mean-squared error with a
closed form, which a seeded Monte Carlo must reproduce. A pinch link can
shrink that error by improving the worst channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..harness.rng import rng_stream
from ..propagation import channel_coeff, pa_point
from ..scenario import Point3, ScenarioConfig, candidate_positions
from .fl import default_fl_scenario


@dataclass(frozen=True)
class AirCompSetup:
    gains: np.ndarray  # complex channel per device
    tx_scalars: np.ndarray  # complex pre-scaling per device
    rx_scale: float  # receiver normalization a > 0
    noise_power: float  # [W]
    power_cap: float  # per-device transmit power cap [W]
    signal_var: float  # variance of the transmitted scalars

    def __post_init__(self) -> None:
        if self.rx_scale <= 0:
            raise ValueError("rx_scale must be > 0")
        powers = np.abs(self.tx_scalars) ** 2 * self.signal_var
        if np.any(powers > self.power_cap * (1.0 + 1e-9)):
            raise ValueError("a device exceeds its transmit power cap")

    @property
    def device_count(self) -> int:
        return int(self.gains.shape[0])


def inversion_with_cutoff(
    gains: np.ndarray, rx_scale: float, power_cap: float, signal_var: float
) -> np.ndarray:
    """Channel inversion where the budget allows, full power otherwise.

    Capped devices align phase but cannot reach the target amplitude, so
    they contribute misalignment.
    """
    b = np.empty(gains.shape[0], dtype=complex)
    for k, h in enumerate(gains):
        mag = abs(h)
        if mag == 0.0:
            b[k] = 0.0
            continue
        wanted = rx_scale / h
        if abs(wanted) ** 2 * signal_var <= power_cap:
            b[k] = wanted
        else:
            b[k] = math.sqrt(power_cap / signal_var) * np.conj(h) / mag
    return b


def make_setup(
    gains: np.ndarray,
    noise_power: float,
    power_cap: float,
    signal_var: float = 1.0,
    rx_scale: float | None = None,
) -> AirCompSetup:
    """Receive scale defaults to the largest value every device can invert."""
    gains = np.asarray(gains, dtype=complex)
    if rx_scale is None:
        mags = np.abs(gains)
        positive = mags[mags > 0]
        if positive.size == 0:
            raise ValueError("all channels are zero")
        if signal_var == 0.0:
            rx_scale = float(positive.min())  # arbitrary: nothing transmits power
        else:
            rx_scale = float(positive.min() * math.sqrt(power_cap / signal_var))
    tx = inversion_with_cutoff(gains, rx_scale, power_cap, signal_var)
    return AirCompSetup(
        gains=gains,
        tx_scalars=tx,
        rx_scale=rx_scale,
        noise_power=noise_power,
        power_cap=power_cap,
        signal_var=signal_var,
    )


@dataclass(frozen=True)
class AirCompReport:
    estimate: complex
    target: float
    mse_analytic: float
    mse_empirical: float
    empirical_se: float  # standard error of the Monte-Carlo MSE
    trials: int


def analytic_mse(setup: AirCompSetup) -> float:
    k = setup.device_count
    beta = setup.tx_scalars * setup.gains / setup.rx_scale
    misalignment = float(np.sum(np.abs(beta - 1.0) ** 2)) * setup.signal_var / k**2
    noise = setup.noise_power / (k**2 * setup.rx_scale**2)
    return misalignment + noise


def aircomp_aggregate(
    setup: AirCompSetup,
    values: np.ndarray,
    trials: int = 0,
    seed: int = 0,
) -> AirCompReport:
    """One aggregation plus an optional Monte-Carlo error estimate.

    The estimate uses the provided values and a single seeded noise draw;
    the empirical MSE redraws values (zero mean, setup.signal_var) and
    noise ``trials`` times.
    """
    values = np.asarray(values, dtype=float)
    k = setup.device_count
    if values.shape[0] != k:
        raise ValueError("one value per device required")
    rng = rng_stream(seed, "aircomp.noise")

    def one_noise() -> complex:
        if setup.noise_power == 0.0:
            return 0.0 + 0.0j
        scale = math.sqrt(setup.noise_power / 2.0)
        return complex(rng.normal(0.0, scale), rng.normal(0.0, scale))

    received = np.sum(setup.tx_scalars * setup.gains * values) + one_noise()
    estimate = received / (k * setup.rx_scale)
    target = float(np.mean(values))

    mse_a = analytic_mse(setup)
    mse_e = math.nan
    se = math.nan
    if trials > 0:
        draws = rng_stream(seed, "aircomp.mc")
        x = draws.normal(0.0, math.sqrt(setup.signal_var), size=(trials, k))
        scale = math.sqrt(setup.noise_power / 2.0)
        if setup.noise_power:
            n = draws.normal(0.0, scale, size=trials) + 1j * draws.normal(0.0, scale, size=trials)
        else:
            n = np.zeros(trials, dtype=complex)
        est = (x @ (setup.tx_scalars * setup.gains) + n) / (k * setup.rx_scale)
        sq_errors = np.abs(est - x.mean(axis=1)) ** 2
        mse_e = float(np.mean(sq_errors))
        se = float(np.std(sq_errors, ddof=1) / math.sqrt(trials))
    return AirCompReport(
        estimate=complex(estimate),
        target=target,
        mse_analytic=mse_a,
        mse_empirical=mse_e,
        empirical_se=se,
        trials=trials,
    )


# -- pinch-assisted aggregation ------------------------------------------------


@dataclass
class AirCompConfig:
    scenario: ScenarioConfig = field(default_factory=default_fl_scenario)
    device_positions: tuple[Point3, ...] = ()
    power_cap: float = 0.1  # [W]
    signal_var: float = 1.0
    noise_power: float = 1e-9  # receiver noise [W]


def _conventional_gains(config: AirCompConfig) -> np.ndarray:
    sc = config.scenario
    return np.array(
        [
            channel_coeff(sc.fixed_antenna_point, 0.0, pos, sc.radio, sc.obstacles)
            for pos in config.device_positions
        ],
        dtype=complex,
    )


def _pinch_gains(config: AirCompConfig, s: float) -> np.ndarray:
    sc = config.scenario
    w = sc.waveguides[0]
    point = pa_point(w, s)
    return np.array(
        [channel_coeff(point, s, pos, sc.radio, sc.obstacles) for pos in config.device_positions],
        dtype=complex,
    )


@dataclass(frozen=True)
class AirCompComparison:
    mse_no_pa: float
    mse_optimized: float
    best_position: float

    @property
    def improvement(self) -> float:
        return self.mse_no_pa - self.mse_optimized


def aircomp_with_pa(config: AirCompConfig, seed: int = 0) -> AirCompComparison:
    """Grid sweep of the activation coordinate minimizing the analytic MSE.

    The baseline aggregates through the fixed room antenna; the optimized
    scheme reads every device through one pinch placed by exhaustive
    sweep over the candidate grid (lowest coordinate wins ties).
    """
    if not config.device_positions:
        raise ValueError("no devices in the scenario")
    base_gains = _conventional_gains(config)
    mse_no_pa = analytic_mse(
        make_setup(base_gains, config.noise_power, config.power_cap, config.signal_var)
    )

    best_s, best_mse = None, math.inf
    for s in candidate_positions(config.scenario.waveguides[0]):
        gains = _pinch_gains(config, float(s))
        if not np.any(np.abs(gains) > 0):
            continue
        mse = analytic_mse(
            make_setup(gains, config.noise_power, config.power_cap, config.signal_var)
        )
        if mse < best_mse:
            best_mse = mse
            best_s = float(s)
    if best_s is None:
        raise ValueError("every candidate position is blocked toward every device")
    return AirCompComparison(mse_no_pa=mse_no_pa, mse_optimized=best_mse, best_position=best_s)
