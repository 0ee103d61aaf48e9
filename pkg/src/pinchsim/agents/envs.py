"""Shared environment for the activation-control scenarios.

One environment serves every agent type: discrete scenarios expose a
joint grid-index action space, continuous ones a bounded per-guide
displacement. The observation bundles user features, current activation
coordinates, a per-user blockage bitmap over the candidate grids
(environment knowledge under the hard-block model), and a velocity slot
that only mobility scenarios fill.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from ..harness.rng import rng_stream
from ..presets import scenario_preset
from ..propagation import los_blocked, pa_point
from ..rates import evaluate
from ..scenario import (
    PinchConfiguration,
    Point3,
    ScenarioConfig,
    User,
    candidate_positions,
    user_position_at,
)

SCENARIOS = ("a", "b", "c", "d", "e", "f")
CONTINUOUS_SCENARIOS = ("c", "f")

# Continuous actions move a pinch at most this fraction of the guide per step.
DISPLACEMENT_FRACTION = 0.1


@dataclass(frozen=True)
class EnvState:
    """Observation snapshot with a fixed per-scenario encoding length."""

    user_positions: tuple[Point3, ...]
    user_qos: tuple[float, ...]
    user_velocities: tuple[Point3, ...]
    pa_coords: tuple[float, ...]  # one active pinch per guide [m]
    blockage: tuple[int, ...]  # user-major, then guide, then grid index
    t: int

    def vector(self, room_scale: float, guide_lengths: tuple[float, ...]) -> np.ndarray:
        feats: list[float] = []
        for p, q in zip(self.user_positions, self.user_qos):
            feats.extend((p.x / room_scale, p.y / room_scale, p.z / room_scale, q))
        for v in self.user_velocities:
            feats.extend((v.x, v.y, v.z))
        for s, length in zip(self.pa_coords, guide_lengths):
            feats.append(s / length)
        feats.extend(float(b) for b in self.blockage)
        return np.array(feats, dtype=float)


class PinchEnv:
    """Episodic activation-control environment over one scenario config.

    Rewards are the achieved sum rate minus ``qos_penalty`` times the total
    QoS shortfall; with a zero penalty the reward equals the rate report's
    sum rate bit for bit.
    """

    def __init__(
        self,
        scenario: str,
        config: ScenarioConfig | None = None,
        seed: int = 0,
        episode_length: int = 10,
        qos_penalty: float = 10.0,
        randomize_users: bool = False,
        randomize_start: bool = False,
        tick_seconds: float = 1.0,
    ):
        if scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
        self.scenario = scenario
        self.config = config if config is not None else scenario_preset(scenario, seed)
        self.seed = seed
        self.episode_length = episode_length
        self.qos_penalty = qos_penalty
        self.randomize_users = randomize_users
        self.randomize_start = randomize_start
        self.tick_seconds = tick_seconds
        self.continuous = scenario in CONTINUOUS_SCENARIOS
        self.grids = [candidate_positions(w) for w in self.config.waveguides]
        self.num_waveguides = len(self.config.waveguides)
        self.num_users = len(self.config.users)
        self.max_displacements = tuple(
            DISPLACEMENT_FRACTION * w.length for w in self.config.waveguides
        )
        self._episode = 0
        self._users: tuple[User, ...] = self.config.users
        self._pa: list[float] = []
        self._positions: list[Point3] = []
        self._prev_positions: list[Point3] = []
        self._t = 0
        self._room_scale = max(
            self.config.room_max.x - self.config.room_min.x,
            self.config.room_max.y - self.config.room_min.y,
            1e-9,
        )

    # -- action space ------------------------------------------------------

    @property
    def action_sizes(self) -> tuple[int, ...]:
        """Per-guide discrete action counts (grid sizes)."""
        return tuple(len(g) for g in self.grids)

    @property
    def joint_action_size(self) -> int:
        return math.prod(self.action_sizes)

    def decode_joint_action(self, code: int) -> tuple[int, ...]:
        idx = []
        for n in reversed(self.action_sizes):
            idx.append(code % n)
            code //= n
        return tuple(reversed(idx))

    def encode_joint_action(self, indices) -> int:
        code = 0
        for n, i in zip(self.action_sizes, indices):
            code = code * n + int(i)
        return code

    # -- observations --------------------------------------------------------

    @property
    def state_dim(self) -> int:
        bitmap = self.num_users * sum(self.action_sizes)
        return 4 * self.num_users + 3 * self.num_users + self.num_waveguides + bitmap

    def local_dim(self, k: int) -> int:
        return 1 + 7 * self.num_users + self.num_users * self.action_sizes[k]

    def local_observation(self, state: EnvState, k: int) -> np.ndarray:
        """Agent k's view: only its own coordinate and its own blockage slice.

        User features are shared; other guides' coordinates and bitmaps are
        private to their agents, which is what makes execution decentralized.
        """
        w = self.config.waveguides[k]
        feats: list[float] = [state.pa_coords[k] / w.length]
        for p, q in zip(state.user_positions, state.user_qos):
            feats.extend((p.x / self._room_scale, p.y / self._room_scale, p.z / self._room_scale, q))
        for v in state.user_velocities:
            feats.extend((v.x, v.y, v.z))
        sizes = self.action_sizes
        for ui in range(self.num_users):
            base = ui * sum(sizes) + sum(sizes[:k])
            feats.extend(float(state.blockage[base + j]) for j in range(sizes[k]))
        return np.array(feats, dtype=float)

    def state_vector(self, state: EnvState) -> np.ndarray:
        return state.vector(self._room_scale, tuple(w.length for w in self.config.waveguides))

    # -- dynamics --------------------------------------------------------------

    def _blockage_bitmap(self, positions: list[Point3]) -> tuple[int, ...]:
        bits: list[int] = []
        for pos in positions:
            for wi, w in enumerate(self.config.waveguides):
                for s in self.grids[wi]:
                    bits.append(int(los_blocked(pa_point(w, float(s)), pos, self.config.obstacles)))
        return tuple(bits)

    def _make_state(self) -> EnvState:
        if self.scenario == "c":
            velocities = tuple(
                Point3(
                    (p.x - q.x) / self.tick_seconds,
                    (p.y - q.y) / self.tick_seconds,
                    (p.z - q.z) / self.tick_seconds,
                )
                for p, q in zip(self._positions, self._prev_positions)
            )
        else:
            velocities = tuple(Point3(0.0, 0.0, 0.0) for _ in self._positions)
        return EnvState(
            user_positions=tuple(self._positions),
            user_qos=tuple(u.qos_min_rate for u in self._users),
            user_velocities=velocities,
            pa_coords=tuple(self._pa),
            blockage=self._blockage_bitmap(self._positions),
            t=self._t,
        )

    def reset(self, episode: int | None = None) -> EnvState:
        if episode is None:
            episode = self._episode
        self._episode = episode + 1
        users = list(self.config.users)
        if self.randomize_users:
            rng = rng_stream(self.seed, f"env.users.{episode}")
            lo, hi = self.config.room_min, self.config.room_max
            users = [
                u
                if u.waypoints  # scripted walkers keep their route
                else dataclasses.replace(
                    u,
                    position=Point3(
                        float(rng.uniform(lo.x + 0.5, hi.x - 0.5)),
                        float(rng.uniform(lo.y + 0.5, hi.y - 0.5)),
                        u.position.z,
                    ),
                )
                for u in users
            ]
        self._users = tuple(users)
        self._t = 0
        self._positions = [user_position_at(u, 0.0) for u in self._users]
        self._prev_positions = list(self._positions)
        if self.randomize_start:
            # Exploring starts, still a pure function of (seed, episode).
            rng = rng_stream(self.seed, f"env.start.{episode}")
            if self.continuous:
                self._pa = [float(rng.uniform(0.0, w.length)) for w in self.config.waveguides]
            else:
                self._pa = [float(g[rng.integers(len(g))]) for g in self.grids]
        else:
            self._pa = [float(g[0]) for g in self.grids]
        return self._make_state()

    def step(self, action) -> tuple[EnvState, float, bool]:
        if self.continuous:
            delta = np.asarray(action, dtype=float).reshape(-1)
            if delta.shape[0] != self.num_waveguides:
                raise ValueError(
                    f"expected {self.num_waveguides} displacement(s), got {delta.shape[0]}"
                )
            for k, w in enumerate(self.config.waveguides):
                move = float(np.clip(delta[k], -self.max_displacements[k], self.max_displacements[k]))
                self._pa[k] = float(np.clip(self._pa[k] + move, 0.0, w.length))
        else:
            if np.isscalar(action) or isinstance(action, (int, np.integer)):
                indices = self.decode_joint_action(int(action))
            else:
                indices = tuple(int(i) for i in action)
            if len(indices) != self.num_waveguides:
                raise ValueError(f"expected {self.num_waveguides} grid indices, got {len(indices)}")
            for k, i in enumerate(indices):
                if not 0 <= i < self.action_sizes[k]:
                    raise ValueError(f"action index {i} out of range for guide {k}")
                self._pa[k] = float(self.grids[k][i])

        self._t += 1
        self._prev_positions = list(self._positions)
        t_now = self._t * self.tick_seconds
        self._positions = [user_position_at(u, t_now) for u in self._users]

        reward = self.reward_for_current()
        done = self._t >= self.episode_length
        return self._make_state(), reward, done

    def reward_for_current(self) -> float:
        pinch = PinchConfiguration.one_per_waveguide(self._pa)
        config = dataclasses.replace(self.config, users=self._users)
        positions = {u.id: p for u, p in zip(self._users, self._positions)}
        report = evaluate(config, pinch, user_positions=positions)
        shortfall = sum(
            max(0.0, u.qos_min_rate - report.per_user_rate.get(u.id, 0.0)) for u in self._users
        )
        return report.sum_rate - self.qos_penalty * shortfall

    def best_joint_action(self) -> tuple[int, float]:
        """Brute force over the joint grid at the current user positions."""
        best_code, best_reward = 0, -math.inf
        saved_pa = list(self._pa)
        for code in range(self.joint_action_size):
            indices = self.decode_joint_action(code)
            for k, i in enumerate(indices):
                self._pa[k] = float(self.grids[k][i])
            reward = self.reward_for_current()
            if reward > best_reward:
                best_reward = reward
                best_code = code
        self._pa = saved_pa
        return best_code, best_reward


def make_env(scenario: str, seed: int = 0, config: ScenarioConfig | None = None, **kwargs) -> PinchEnv:
    return PinchEnv(scenario, config=config, seed=seed, **kwargs)


def env_reset(scenario: str, seed: int, config: ScenarioConfig | None = None, **kwargs) -> EnvState:
    """Deterministic initial state for a (scenario, seed) pair."""
    return make_env(scenario, seed=seed, config=config, **kwargs).reset(episode=0)
