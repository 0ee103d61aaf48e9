"""Per-link channel coefficients for active pinches.

The model is free-space spherical spreading with the propagation phase of
the direct path, plus the phase (and optional attenuation) accumulated
inside the guide up to the activation coordinate. Blockage is hard: a
link whose segment crosses any obstacle box has coefficient exactly zero,
which also makes the interference-suppression effect of obstacles an
exact invariant rather than a statistical tendency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .scenario import (
    Obstacle,
    PinchConfiguration,
    Point3,
    RadioConstants,
    ScenarioConfig,
    User,
    Waveguide,
)


def pa_point(w: Waveguide, s: float) -> Point3:
    """Room coordinates of the pinch at guide coordinate ``s``."""
    if not 0.0 <= s <= w.length:
        raise ValueError(f"pinch coordinate {s} outside [0, {w.length}]")
    return Point3(
        w.feed.x + s * w.axis.x,
        w.feed.y + s * w.axis.y,
        w.feed.z + s * w.axis.z,
    )


def _segment_hits_box(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> bool:
    # Slab test on the closed segment; touching a face counts as a hit.
    d = b - a
    t0, t1 = 0.0, 1.0
    for i in range(3):
        if d[i] == 0.0:
            if a[i] < lo[i] or a[i] > hi[i]:
                return False
        else:
            ta = (lo[i] - a[i]) / d[i]
            tb = (hi[i] - a[i]) / d[i]
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
            if t0 > t1:
                return False
    return True


def los_blocked(a: Point3, b: Point3, obstacles: Iterable[Obstacle]) -> bool:
    """True iff the segment from ``a`` to ``b`` intersects any obstacle box."""
    pa = a.as_array()
    pb = b.as_array()
    for ob in obstacles:
        if _segment_hits_box(pa, pb, ob.lo.as_array(), ob.hi.as_array()):
            return True
    return False


def channel_coeff(
    pa: Point3,
    s: float,
    user_pos: Point3,
    radio: RadioConstants,
    obstacles: Iterable[Obstacle] = (),
) -> complex:
    """Complex coefficient of one pinch-to-user link (0 when blocked).

    Unblocked links follow sqrt(eta)/d with the free-space phase over the
    air distance d and the in-guide phase n_eff * s, attenuated in
    amplitude by the configured dB/m along the guide.
    """
    d = pa.distance_to(user_pos)
    if d == 0.0:
        raise ValueError("pinch and user positions coincide")
    if los_blocked(pa, user_pos, obstacles):
        return 0.0 + 0.0j
    lam = radio.wavelength
    amp = math.sqrt(radio.eta) / d
    if radio.attenuation_db_per_m > 0.0:
        amp *= 10.0 ** (-radio.attenuation_db_per_m * s / 20.0)
    phase = -2.0 * math.pi * (d + radio.n_eff * s) / lam
    return amp * complex(math.cos(phase), math.sin(phase))


def effective_gain(
    w: Waveguide,
    pinch: PinchConfiguration,
    wg_index: int,
    user_pos: Point3,
    radio: RadioConstants,
    obstacles: Iterable[Obstacle] = (),
) -> float:
    """Coherent power gain of all active pinches on one guide toward a user.

    The feed splits amplitude evenly over the M active pinches, so the
    gain is |sum h_m / sqrt(M)|^2.
    """
    positions = pinch.active_positions(wg_index)
    if not positions:
        raise ValueError(f"waveguide {w.id} has no active pinch")
    m = len(positions)
    total = 0.0 + 0.0j
    for s in positions:
        total += channel_coeff(pa_point(w, s), s, user_pos, radio, obstacles)
    return abs(total / math.sqrt(m)) ** 2


@dataclass(frozen=True)
class LinkState:
    """Channel snapshot for every (user, waveguide) pair.

    ``coefficients[u][w]`` holds the per-active-pinch complex coefficients,
    ``blocked[u][w]`` the matching blockage flags, and ``gains[u, w]`` the
    effective power gain of the coherent sum with an even feed split.
    """

    user_ids: tuple[int, ...]
    coefficients: tuple[tuple[tuple[complex, ...], ...], ...]
    blocked: tuple[tuple[tuple[bool, ...], ...], ...]
    gains: np.ndarray  # shape (num_users, num_waveguides)

    def gain(self, user_index: int, wg_index: int) -> float:
        return float(self.gains[user_index, wg_index])


def compute_link_state(
    config: ScenarioConfig,
    pinch: PinchConfiguration,
    user_positions: dict[int, Point3] | None = None,
) -> LinkState:
    """Evaluate every user/waveguide link for one pinch configuration.

    ``user_positions`` overrides user locations (used for mobility ticks);
    users default to their configured positions.
    """
    coeffs = []
    blocked = []
    gains = np.zeros((len(config.users), len(config.waveguides)))
    for ui, user in enumerate(config.users):
        pos = user.position if user_positions is None else user_positions.get(user.id, user.position)
        row_c = []
        row_b = []
        for wi, w in enumerate(config.waveguides):
            positions = pinch.active_positions(wi)
            per_pa = []
            per_blocked = []
            for s in positions:
                point = pa_point(w, s)
                is_blocked = los_blocked(point, pos, config.obstacles)
                per_blocked.append(is_blocked)
                per_pa.append(0.0 + 0.0j if is_blocked else channel_coeff(point, s, pos, config.radio))
            row_c.append(tuple(per_pa))
            row_b.append(tuple(per_blocked))
            if per_pa:
                m = len(per_pa)
                gains[ui, wi] = abs(sum(per_pa) / math.sqrt(m)) ** 2
        coeffs.append(tuple(row_c))
        blocked.append(tuple(row_b))
    return LinkState(
        user_ids=tuple(u.id for u in config.users),
        coefficients=tuple(coeffs),
        blocked=tuple(blocked),
        gains=gains,
    )
