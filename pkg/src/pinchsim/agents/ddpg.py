"""Deterministic actor-critic control of continuous activation positions.

One deterministic actor per guide maps that guide's local observation to
a bounded displacement (tanh-squashed). A single critic scores the joint
(state, all actions) pair and exists only on the training path; greedy
execution touches actors alone. Single-guide DDPG is literally the K = 1
case of the same loop, so both share every RNG stream and produce
identical traces when the guide count is one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..harness.rng import rng_stream
from ..neural import AdamOptimizer, MlpModel
from .config import AgentConfig
from .envs import EnvState, PinchEnv
from .replay import ReplayBuffer, Transition


@dataclass
class EpisodeLog:
    episode: int
    mean_reward: float
    noise_sigma: float
    eval_reward: float = math.nan


class CountingCritic:
    """Critic wrapper that counts forward calls; the execution-path count
    must stay at zero."""

    def __init__(self, model: MlpModel):
        self.model = model
        self.calls = 0

    def forward(self, x: np.ndarray) -> np.ndarray:
        self.calls += 1
        return self.model.forward(x)

    def backward(self, x: np.ndarray, dy: np.ndarray):
        return self.model.backward(x, dy)


@dataclass
class MaddpgResult:
    actors: list[MlpModel]
    critic: CountingCritic
    config: AgentConfig
    max_displacements: tuple[float, ...]
    trace: list[EpisodeLog] = field(default_factory=list)
    critic_training_calls: int = 0

    def agent_action(self, env: PinchEnv, state: EnvState, k: int) -> float:
        """Greedy displacement for guide k from its local observation only."""
        raw = float(self.actors[k].forward(env.local_observation(state, k))[0])
        return self.max_displacements[k] * math.tanh(raw)

    def policy(self, env: PinchEnv, state: EnvState) -> np.ndarray:
        return np.array([self.agent_action(env, state, k) for k in range(len(self.actors))])


def _actions_of(result_actors, env, state, max_disp) -> np.ndarray:
    return np.array(
        [
            max_disp[k] * math.tanh(float(result_actors[k].forward(env.local_observation(state, k))[0]))
            for k in range(len(result_actors))
        ]
    )


def train_maddpg(env: PinchEnv, cfg: AgentConfig) -> MaddpgResult:
    """Centralized-critic training, decentralized execution."""
    if not env.continuous:
        raise ValueError("MADDPG needs a continuous action space")
    k_agents = env.num_waveguides
    init_rng = rng_stream(cfg.seed, "ddpg.init")
    actors = [
        MlpModel([env.local_dim(k), *cfg.hidden, 1], seed=int(init_rng.integers(2**31)))
        for k in range(k_agents)
    ]
    critic_model = MlpModel(
        [env.state_dim + k_agents, *cfg.hidden, 1], seed=int(init_rng.integers(2**31))
    )
    critic = CountingCritic(critic_model)
    actor_targets = [a.clone() for a in actors]
    critic_target = critic_model.clone()
    actor_opts = [AdamOptimizer(a, cfg.actor_lr) for a in actors]
    critic_opt = AdamOptimizer(critic_model, cfg.lr)
    buffer = ReplayBuffer(cfg.buffer_capacity, rng_stream(cfg.seed, "ddpg.replay"))
    noise_rng = rng_stream(cfg.seed, "ddpg.noise")

    env.episode_length = cfg.episode_length
    env.qos_penalty = cfg.qos_penalty
    max_disp = env.max_displacements
    lengths = [w.length for w in env.config.waveguides]
    total_steps = cfg.episodes * cfg.episode_length
    result = MaddpgResult(actors=actors, critic=critic, config=cfg, max_displacements=max_disp)

    def noise_sigma(step: int) -> float:
        frac = min(1.0, step / max(1, total_steps))
        scale = cfg.noise_start_frac + frac * (cfg.noise_end_frac - cfg.noise_start_frac)
        return scale

    step = 0
    for episode in range(cfg.episodes):
        state = env.reset(episode=episode)
        rewards = []
        done = False
        while not done:
            sigma = noise_sigma(step)
            action = _actions_of(actors, env, state, max_disp)
            for k in range(k_agents):
                action[k] += sigma * lengths[k] * noise_rng.normal()
                action[k] = float(np.clip(action[k], -max_disp[k], max_disp[k]))
            next_state, reward, done = env.step(action)
            buffer.push(Transition(state, action.copy(), reward, next_state, done))
            state = next_state
            rewards.append(reward)
            step += 1
            if len(buffer) >= cfg.batch_size:
                _update(env, cfg, buffer, actors, actor_targets, critic, critic_target, actor_opts, critic_opt, max_disp, result)
            if step % cfg.target_sync == 0:
                critic_target.set_parameters([p.copy() for p in critic_model.parameters()])
                for a, t in zip(actors, actor_targets):
                    t.set_parameters([p.copy() for p in a.parameters()])
        log = EpisodeLog(episode=episode, mean_reward=float(np.mean(rewards)), noise_sigma=noise_sigma(step))
        if cfg.eval_every and (episode + 1) % cfg.eval_every == 0:
            log.eval_reward = evaluate_policy(env, result)
        result.trace.append(log)
    return result


def _update(
    env: PinchEnv,
    cfg: AgentConfig,
    buffer: ReplayBuffer,
    actors: list[MlpModel],
    actor_targets: list[MlpModel],
    critic: CountingCritic,
    critic_target: MlpModel,
    actor_opts: list[AdamOptimizer],
    critic_opt: AdamOptimizer,
    max_disp: tuple[float, ...],
    result: MaddpgResult,
) -> None:
    batch = buffer.sample(cfg.batch_size)
    k_agents = len(actors)
    states = np.stack([env.state_vector(t.state) for t in batch])
    next_states = np.stack([env.state_vector(t.next_state) for t in batch])
    actions = np.stack([np.asarray(t.action, dtype=float) for t in batch])
    rewards = np.array([t.reward for t in batch])
    dones = np.array([t.done for t in batch], dtype=float)

    local = [np.stack([env.local_observation(t.state, k) for t in batch]) for k in range(k_agents)]
    next_local = [
        np.stack([env.local_observation(t.next_state, k) for t in batch]) for k in range(k_agents)
    ]

    # Critic step: TD target from the target actors and target critic.
    next_actions = np.column_stack(
        [max_disp[k] * np.tanh(actor_targets[k].forward(next_local[k])[:, 0]) for k in range(k_agents)]
    )
    target_q = critic_target.forward(np.hstack([next_states, next_actions]))[:, 0]
    y = rewards + cfg.gamma * (1.0 - dones) * target_q
    joint = np.hstack([states, actions])
    pred = critic.forward(joint)[:, 0]
    result.critic_training_calls += 1
    residual = (pred - y).reshape(-1, 1)
    dy = np.clip(residual, -1.0, 1.0) / residual.size
    grads, _ = critic.backward(joint, dy)
    critic_opt.step(grads)

    # Actor steps: ascend the critic through each agent's action slot.
    for k in range(k_agents):
        raw = actors[k].forward(local[k])
        squashed = max_disp[k] * np.tanh(raw)
        acts = actions.copy()
        acts[:, k] = squashed[:, 0]
        joint_k = np.hstack([states, acts])
        _, dx = critic.backward(joint_k, -np.ones((len(batch), 1)) / len(batch))
        result.critic_training_calls += 1
        d_action = dx[:, states.shape[1] + k].reshape(-1, 1)
        d_raw = d_action * max_disp[k] * (1.0 - np.tanh(raw) ** 2)
        d_raw = d_raw + cfg.actor_reg * raw / len(batch)
        agrads, _ = actors[k].backward(local[k], d_raw)
        actor_opts[k].step(agrads)


def evaluate_policy(env: PinchEnv, result: MaddpgResult, episode: int = 0) -> float:
    """Mean per-step reward of a noise-free rollout (actors only)."""
    state = env.reset(episode=episode)
    rewards = []
    done = False
    while not done:
        state, reward, done = env.step(result.policy(env, state))
        rewards.append(reward)
    return float(np.mean(rewards))


def train_ddpg(env: PinchEnv, cfg: AgentConfig) -> MaddpgResult:
    """Single-guide DDPG: the K = 1 case of the multi-agent loop."""
    if env.num_waveguides != 1:
        raise ValueError("train_ddpg expects a single guide; use train_maddpg")
    return train_maddpg(env, cfg)
