"""Connectivity tracking for a moving device.

Each tick the device attaches to the guide offering the best effective
gain (handovers counted on change) and its rate is checked against an
outage threshold. Tracking modes: keep the initial activation, re-sweep
the grid every tick, or follow a trained continuous policy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..propagation import effective_gain
from ..rates import oma_rate
from ..scenario import (
    PinchConfiguration,
    Point3,
    ScenarioConfig,
    candidate_positions,
    user_position_at,
)


class TrackingMode(str, enum.Enum):
    NONE = "NONE"
    GRID = "GRID"
    DDPG_POLICY = "DDPG_POLICY"


@dataclass(frozen=True)
class TickLog:
    tick: int
    position: Point3
    serving: int  # waveguide index
    rate: float
    outage: bool
    pa_coords: tuple[float, ...]


@dataclass
class MobilityReport:
    mode: TrackingMode
    ticks: list[TickLog]
    outage_fraction: float
    handovers: int
    staleness: int  # longest contiguous outage run [ticks]


def _gain(config: ScenarioConfig, wi: int, s: float, pos: Point3) -> float:
    pinch = PinchConfiguration.one_per_waveguide(
        [s if i == wi else 0.0 for i in range(len(config.waveguides))]
    )
    return effective_gain(config.waveguides[wi], pinch, wi, pos, config.radio, config.obstacles)


def mobility_track(
    config: ScenarioConfig,
    ticks: int,
    mode: TrackingMode | str,
    outage_rate: float,
    tick_seconds: float = 1.0,
    tx_power: float | None = None,
    policy=None,
) -> MobilityReport:
    """Follow the first user's route for ``ticks`` steps under one tracker.

    ``policy`` (required for DDPG_POLICY) maps (tick index, device
    position, current coords) to per-guide displacements.
    """
    mode = TrackingMode(mode)
    if not config.users:
        raise ValueError("mobility tracking needs a user")
    if mode is TrackingMode.DDPG_POLICY and policy is None:
        raise ValueError("DDPG_POLICY requires a policy")
    user = config.users[0]
    if tx_power is None:
        tx_power = config.waveguides[0].tx_power
    grids = [candidate_positions(w) for w in config.waveguides]
    coords = [0.5 * w.length for w in config.waveguides]

    logs: list[TickLog] = []
    serving_prev: int | None = None
    handovers = 0
    outage_run = 0
    staleness = 0
    outages = 0

    for t in range(ticks):
        pos = user_position_at(user, (t + 1) * tick_seconds)

        if mode is TrackingMode.GRID:
            # Each guide presents its best candidate toward the device.
            for wi in range(len(config.waveguides)):
                best_s, best_g = coords[wi], -math.inf
                for s in grids[wi]:
                    g = _gain(config, wi, float(s), pos)
                    if g > best_g:
                        best_g = g
                        best_s = float(s)
                coords[wi] = best_s
        elif mode is TrackingMode.DDPG_POLICY:
            moves = np.asarray(policy(t, pos, tuple(coords)), dtype=float).reshape(-1)
            for wi, w in enumerate(config.waveguides):
                coords[wi] = float(np.clip(coords[wi] + moves[wi], 0.0, w.length))

        gains = [_gain(config, wi, coords[wi], pos) for wi in range(len(config.waveguides))]
        serving = int(np.argmax(gains))
        if serving_prev is not None and serving != serving_prev:
            handovers += 1
        serving_prev = serving
        rate = oma_rate(gains[serving], tx_power, config.radio.noise_power)
        outage = rate < outage_rate
        if outage:
            outages += 1
            outage_run += 1
            staleness = max(staleness, outage_run)
        else:
            outage_run = 0
        logs.append(
            TickLog(
                tick=t,
                position=pos,
                serving=serving,
                rate=rate,
                outage=outage,
                pa_coords=tuple(coords),
            )
        )

    return MobilityReport(
        mode=mode,
        ticks=logs,
        outage_fraction=outages / ticks if ticks else 0.0,
        handovers=handovers,
        staleness=staleness,
    )
