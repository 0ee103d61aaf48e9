"""Demand-aware activation scheduling for moving traffic hotspots.

A traffic map assigns each user a per-slot demand weight. The adaptive
policy re-places the pinch each slot to maximize the worst
demand-normalized rate; the static policy freezes the slot-0 placement.
Per slot the adaptive choice sweeps the same candidate grid the static
one came from, so its objective can never fall below static's.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..propagation import compute_link_state
from ..rates import oma_rate
from ..scenario import PinchConfiguration, ScenarioConfig, candidate_positions


class HotspotPolicy(str, enum.Enum):
    STATIC = "STATIC"
    ADAPTIVE = "ADAPTIVE"


@dataclass(frozen=True)
class SlotLog:
    slot: int
    position: float
    weighted_min_rate: float  # min over demanded users of rate / demand
    served_load: float  # sum of min(rate, demand)
    per_user_rate: dict[int, float]


@dataclass
class HotspotResult:
    policy: HotspotPolicy
    slots: list[SlotLog]

    @property
    def weighted_min_rates(self) -> list[float]:
        return [s.weighted_min_rate for s in self.slots]


def _user_rates(config: ScenarioConfig, s: float, tx_power: float) -> dict[int, float]:
    pinch = PinchConfiguration.one_per_waveguide([s])
    links = compute_link_state(config, pinch)
    return {
        u.id: oma_rate(links.gain(i, 0), tx_power, config.radio.noise_power)
        for i, u in enumerate(config.users)
    }


def _objective(rates: dict[int, float], demand: dict[int, float]) -> float:
    active = [uid for uid, w in demand.items() if w > 0]
    if not active:
        return 0.0
    return min(rates[uid] / demand[uid] for uid in active)


def _served(rates: dict[int, float], demand: dict[int, float]) -> float:
    return sum(min(rates[uid], w) for uid, w in demand.items() if w > 0)


def hotspot_schedule(
    config: ScenarioConfig,
    traffic: np.ndarray,
    policy: HotspotPolicy | str,
    tx_power: float | None = None,
) -> HotspotResult:
    """Run one policy over a (slots x users) demand-weight map.

    Demands are in rate units; the per-slot objective is the worst ratio
    of delivered rate to demanded rate among users with demand.
    """
    policy = HotspotPolicy(policy)
    if len(config.waveguides) != 1:
        raise ValueError("hotspot scheduling drives a single guide")
    traffic = np.asarray(traffic, dtype=float)
    if traffic.ndim != 2 or traffic.shape[1] != len(config.users):
        raise ValueError("traffic map must be (slots, users)")
    if tx_power is None:
        tx_power = config.waveguides[0].tx_power
    grid = [float(s) for s in candidate_positions(config.waveguides[0])]
    user_ids = [u.id for u in config.users]

    def best_position(demand: dict[int, float]) -> tuple[float, dict[int, float]]:
        best_s, best_value, best_rates = grid[0], -math.inf, {}
        for s in grid:
            rates = _user_rates(config, s, tx_power)
            value = _objective(rates, demand)
            if value > best_value:
                best_s, best_value, best_rates = s, value, rates
        return best_s, best_rates

    slots: list[SlotLog] = []
    static_s: float | None = None
    for t in range(traffic.shape[0]):
        demand = {uid: float(traffic[t, j]) for j, uid in enumerate(user_ids)}
        if policy is HotspotPolicy.ADAPTIVE or static_s is None:
            s, rates = best_position(demand)
            if static_s is None:
                static_s = s
            if policy is HotspotPolicy.STATIC:
                s, rates = static_s, _user_rates(config, static_s, tx_power)
        else:
            s, rates = static_s, _user_rates(config, static_s, tx_power)
        slots.append(
            SlotLog(
                slot=t,
                position=s,
                weighted_min_rate=_objective(rates, demand),
                served_load=_served(rates, demand),
                per_user_rate=rates,
            )
        )
    return HotspotResult(policy=policy, slots=slots)
