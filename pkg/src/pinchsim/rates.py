"""Shannon-rate objectives on top of effective link gains.

Rates are spectral efficiencies (unit bandwidth). Users on one guide are
served orthogonally in OMA, by power-domain superposition with SIC in
NOMA, and across guides with inter-guide interference in multi-waveguide
mode. SIC decode order follows descending effective gain with the lower
user id winning ties, so every report is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .propagation import LinkState, compute_link_state
from .scenario import AccessMode, PinchConfiguration, Point3, ScenarioConfig, nearest_waveguide


@dataclass(frozen=True)
class PowerAllocation:
    """Transmit power per user id [W]."""

    per_user: dict[int, float]

    @classmethod
    def even_split(cls, config: ScenarioConfig, assignment: dict[int, int]) -> "PowerAllocation":
        """Each guide's budget split evenly over the users it serves."""
        counts: dict[int, int] = {}
        for wg in assignment.values():
            counts[wg] = counts.get(wg, 0) + 1
        per_user = {
            uid: config.waveguides[wg].tx_power / counts[wg] for uid, wg in assignment.items()
        }
        return cls(per_user)

    @classmethod
    def from_waveguide_levels(
        cls, config: ScenarioConfig, levels: dict[int, float], assignment: dict[int, int]
    ) -> "PowerAllocation":
        """Per-guide power levels split evenly over each guide's users."""
        counts: dict[int, int] = {}
        for wg in assignment.values():
            counts[wg] = counts.get(wg, 0) + 1
        per_user = {uid: levels[wg] / counts[wg] for uid, wg in assignment.items()}
        return cls(per_user)

    def waveguide_power(self, assignment: dict[int, int], wg_index: int) -> float:
        return sum(p for uid, p in self.per_user.items() if assignment.get(uid) == wg_index)

    def total(self) -> float:
        return sum(self.per_user.values())

    def validate(self, config: ScenarioConfig, assignment: dict[int, int]) -> None:
        for uid, p in self.per_user.items():
            if p < 0:
                raise ValueError(f"user {uid}: negative power {p}")
        for wi, w in enumerate(config.waveguides):
            total = self.waveguide_power(assignment, wi)
            if total > w.tx_power * (1.0 + 1e-9):
                raise ValueError(
                    f"waveguide {w.id}: allocated {total} W exceeds budget {w.tx_power} W"
                )


@dataclass(frozen=True)
class RateReport:
    per_user_rate: dict[int, float]  # [bit/s/Hz]
    sum_rate: float
    min_rate: float
    energy_efficiency: float  # [bit/s/Hz per W]
    qos_violations: tuple[int, ...]  # ids of users below their QoS floor
    sic_orders: dict[int, tuple[int, ...]] = field(default_factory=dict)  # per waveguide index


def oma_rate(g: float, p: float, noise_power: float) -> float:
    """Shannon rate of an interference-free link."""
    if noise_power <= 0:
        raise ValueError("noise power must be > 0")
    if p < 0 or g < 0:
        raise ValueError("power and gain must be >= 0")
    return math.log2(1.0 + p * g / noise_power)


def noma_rates(
    g1: float, g2: float, p1: float, p2: float, noise_power: float
) -> tuple[float, float, tuple[int, int]]:
    """Two-user power-domain NOMA rates with gain-ordered SIC.

    Argument position doubles as the id tie-break: user 1 decodes first on
    equal gains. The strong user cancels the weak signal; the weak user's
    rate is capped by the strong receiver's ability to decode the weak
    message first (the cap never binds under gain ordering but keeps the
    feasibility contract explicit). Returns (rate1, rate2, decode_order).
    """
    if g1 >= g2:
        gs, ps, gw, pw = g1, p1, g2, p2
        order = (1, 2)
    else:
        gs, ps, gw, pw = g2, p2, g1, p1
        order = (2, 1)
    rate_strong = math.log2(1.0 + ps * gs / noise_power)
    at_weak = math.log2(1.0 + pw * gw / (ps * gw + noise_power))
    at_strong = math.log2(1.0 + pw * gs / (ps * gs + noise_power))
    rate_weak = min(at_weak, at_strong)
    if order == (1, 2):
        return rate_strong, rate_weak, order
    return rate_weak, rate_strong, order


def multi_waveguide_sinr(
    config: ScenarioConfig,
    pinch: PinchConfiguration,
    assignment: dict[int, int],
    power: PowerAllocation,
    links: LinkState | None = None,
) -> dict[int, float]:
    """Per-user SINR with every other guide treated as interference.

    A user's own guide contributes the user's allocated power; each other
    guide interferes with its full allocated power scaled by that guide's
    gain toward the user.
    """
    if links is None:
        links = compute_link_state(config, pinch)
    wg_power = [power.waveguide_power(assignment, wi) for wi in range(len(config.waveguides))]
    out: dict[int, float] = {}
    for ui, user in enumerate(config.users):
        if user.id not in assignment:
            raise ValueError(f"user {user.id} has no waveguide assignment")
        own = assignment[user.id]
        signal = power.per_user.get(user.id, 0.0) * links.gain(ui, own)
        interference = sum(
            wg_power[wi] * links.gain(ui, wi) for wi in range(len(config.waveguides)) if wi != own
        )
        out[user.id] = signal / (config.radio.noise_power + interference)
    return out


def default_assignment(config: ScenarioConfig) -> dict[int, int]:
    """Each user served by its geometrically nearest guide."""
    return {u.id: nearest_waveguide(config, u.position) for u in config.users}


def evaluate(
    config: ScenarioConfig,
    pinch: PinchConfiguration,
    power: PowerAllocation | None = None,
    assignment: dict[int, int] | None = None,
    user_positions: dict[int, Point3] | None = None,
) -> RateReport:
    """Full rate report for one pinch configuration.

    Defaults: nearest-guide assignment and an even split of each guide's
    power budget. Energy efficiency divides the sum rate by total transmit
    power plus the static circuit power.
    """
    if assignment is None:
        assignment = default_assignment(config)
    if power is None:
        power = PowerAllocation.even_split(config, assignment)
    power.validate(config, assignment)

    links = compute_link_state(config, pinch, user_positions)
    noise = config.radio.noise_power
    user_index = {u.id: i for i, u in enumerate(config.users)}
    rates: dict[int, float] = {}
    sic_orders: dict[int, tuple[int, ...]] = {}

    if config.access_mode is AccessMode.MULTI_WAVEGUIDE:
        sinr = multi_waveguide_sinr(config, pinch, assignment, power, links)
        rates = {uid: math.log2(1.0 + v) for uid, v in sinr.items()}
    elif config.access_mode is AccessMode.NOMA:
        by_wg: dict[int, list[int]] = {}
        for uid, wg in assignment.items():
            by_wg.setdefault(wg, []).append(uid)
        for wg, uids in sorted(by_wg.items()):
            uids.sort()
            if len(uids) == 1:
                uid = uids[0]
                rates[uid] = oma_rate(
                    links.gain(user_index[uid], wg), power.per_user.get(uid, 0.0), noise
                )
            elif len(uids) == 2:
                a, b = uids
                r1, r2, order = noma_rates(
                    links.gain(user_index[a], wg),
                    links.gain(user_index[b], wg),
                    power.per_user.get(a, 0.0),
                    power.per_user.get(b, 0.0),
                    noise,
                )
                rates[a] = r1
                rates[b] = r2
                sic_orders[wg] = tuple(uids[i - 1] for i in order)
            else:
                raise ValueError(f"waveguide index {wg}: NOMA supports at most 2 users per guide")
    else:  # OMA
        for uid, wg in assignment.items():
            rates[uid] = oma_rate(
                links.gain(user_index[uid], wg), power.per_user.get(uid, 0.0), noise
            )

    sum_rate = sum(rates.values())
    min_rate = min(rates.values()) if rates else 0.0
    ee = sum_rate / (power.total() + config.p_circuit)
    violations = tuple(
        u.id for u in config.users if rates.get(u.id, 0.0) < u.qos_min_rate - 1e-12
    )
    return RateReport(
        per_user_rate=rates,
        sum_rate=sum_rate,
        min_rate=min_rate,
        energy_efficiency=ee,
        qos_violations=violations,
        sic_orders=sic_orders,
    )
