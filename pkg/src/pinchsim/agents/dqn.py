"""Value-based activation control: single-agent DQN and independent
multi-agent DQN with a shared global reward.

Both trainers use experience replay, a hard-synced target network, an
epsilon-greedy linear schedule, and Huber TD errors. The multi-agent
variant trains one independent network per guide on local observations
only; coordination comes entirely through the shared reward.
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
    epsilon: float
    eval_reward: float = math.nan  # greedy rollout, nan when not evaluated


@dataclass
class DqnResult:
    model: MlpModel
    config: AgentConfig
    trace: list[EpisodeLog] = field(default_factory=list)

    def policy(self, env: PinchEnv, state: EnvState) -> int:
        return greedy_action(self.model, env.state_vector(state))


def greedy_action(model: MlpModel, features: np.ndarray) -> int:
    """Argmax action; numpy's argmax already breaks ties to the lowest index."""
    return int(np.argmax(model.forward(features)))


def _epsilon(cfg: AgentConfig, step: int, total_steps: int) -> float:
    horizon = max(1, int(cfg.epsilon_decay_fraction * total_steps))
    frac = min(1.0, step / horizon)
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)


def _td_update(
    model: MlpModel,
    target: MlpModel,
    optimizer: AdamOptimizer,
    batch: list[Transition],
    state_of,
    gamma: float,
) -> None:
    states = np.stack([state_of(t.state) for t in batch])
    next_states = np.stack([state_of(t.next_state) for t in batch])
    actions = np.array([t.action for t in batch], dtype=int)
    rewards = np.array([t.reward for t in batch])
    dones = np.array([t.done for t in batch], dtype=float)

    next_q = target.forward(next_states)
    td = rewards + gamma * (1.0 - dones) * next_q.max(axis=1)
    pred = model.forward(states)

    # Huber on the chosen entries only; every other residual is zero, so
    # only the acted-on outputs carry gradient.
    residual = np.zeros_like(pred)
    rows = np.arange(len(batch))
    residual[rows, actions] = pred[rows, actions] - td
    dy = np.clip(residual, -1.0, 1.0) / residual.size
    grads, _ = model.backward(states, dy)
    optimizer.step(grads)


def train_dqn(env: PinchEnv, cfg: AgentConfig) -> DqnResult:
    """Single-agent DQN over the joint discrete action space."""
    if env.continuous:
        raise ValueError("DQN needs a discrete action space")
    init_rng = rng_stream(cfg.seed, "dqn.init")
    model = MlpModel(
        [env.state_dim, *cfg.hidden, env.joint_action_size],
        seed=int(init_rng.integers(2**31)),
    )
    target = model.clone()
    optimizer = AdamOptimizer(model, cfg.lr)
    buffer = ReplayBuffer(cfg.buffer_capacity, rng_stream(cfg.seed, "dqn.replay"))
    explore = rng_stream(cfg.seed, "dqn.explore")

    env.episode_length = cfg.episode_length
    env.qos_penalty = cfg.qos_penalty
    total_steps = cfg.episodes * cfg.episode_length
    result = DqnResult(model=model, config=cfg)
    step = 0
    for episode in range(cfg.episodes):
        state = env.reset(episode=episode)
        rewards = []
        done = False
        while not done:
            eps = _epsilon(cfg, step, total_steps)
            if explore.random() < eps:
                action = int(explore.integers(env.joint_action_size))
            else:
                action = greedy_action(model, env.state_vector(state))
            next_state, reward, done = env.step(action)
            buffer.push(Transition(state, action, reward, next_state, done))
            state = next_state
            rewards.append(reward)
            step += 1
            if len(buffer) >= cfg.batch_size:
                _td_update(model, target, optimizer, buffer.sample(cfg.batch_size), env.state_vector, cfg.gamma)
            if step % cfg.target_sync == 0:
                target.set_parameters([p.copy() for p in model.parameters()])
        log = EpisodeLog(episode=episode, mean_reward=float(np.mean(rewards)), epsilon=_epsilon(cfg, step, total_steps))
        if cfg.eval_every and (episode + 1) % cfg.eval_every == 0:
            log.eval_reward = evaluate_greedy(env, result.policy)
        result.trace.append(log)
    return result


def evaluate_greedy(env: PinchEnv, policy, episode: int = 0) -> float:
    """Mean per-step reward of a greedy rollout (no exploration)."""
    state = env.reset(episode=episode)
    rewards = []
    done = False
    while not done:
        state, reward, done = env.step(policy(env, state))
        rewards.append(reward)
    return float(np.mean(rewards))


# ---------------------------------------------------------------------------
# Independent multi-agent DQN
# ---------------------------------------------------------------------------


@dataclass
class MadqnResult:
    models: list[MlpModel]
    config: AgentConfig
    trace: list[EpisodeLog] = field(default_factory=list)

    def agent_action(self, env: PinchEnv, state: EnvState, k: int) -> int:
        """Greedy action of one agent from its local observation only."""
        return greedy_action(self.models[k], env.local_observation(state, k))

    def policy(self, env: PinchEnv, state: EnvState) -> tuple[int, ...]:
        return tuple(self.agent_action(env, state, k) for k in range(len(self.models)))


def train_madqn(env: PinchEnv, cfg: AgentConfig) -> MadqnResult:
    """One independent learner per guide, all paid the same global reward."""
    if env.continuous:
        raise ValueError("MADQN needs discrete action spaces")
    if env.num_waveguides < 2:
        raise ValueError("MADQN expects at least two guides (use DQN otherwise)")
    init_rng = rng_stream(cfg.seed, "madqn.init")
    models = [
        MlpModel(
            [env.local_dim(k), *cfg.hidden, env.action_sizes[k]],
            seed=int(init_rng.integers(2**31)),
        )
        for k in range(env.num_waveguides)
    ]
    targets = [m.clone() for m in models]
    optimizers = [AdamOptimizer(m, cfg.lr) for m in models]
    buffers = [
        ReplayBuffer(cfg.buffer_capacity, rng_stream(cfg.seed, f"madqn.replay.{k}"))
        for k in range(env.num_waveguides)
    ]
    explore = rng_stream(cfg.seed, "madqn.explore")

    env.episode_length = cfg.episode_length
    env.qos_penalty = cfg.qos_penalty
    total_steps = cfg.episodes * cfg.episode_length
    result = MadqnResult(models=models, config=cfg)
    step = 0
    for episode in range(cfg.episodes):
        state = env.reset(episode=episode)
        rewards = []
        done = False
        while not done:
            eps = _epsilon(cfg, step, total_steps)
            actions = []
            for k in range(env.num_waveguides):
                if explore.random() < eps:
                    actions.append(int(explore.integers(env.action_sizes[k])))
                else:
                    actions.append(greedy_action(models[k], env.local_observation(state, k)))
            next_state, reward, done = env.step(tuple(actions))
            for k in range(env.num_waveguides):
                buffers[k].push(Transition(state, actions[k], reward, next_state, done))
            state = next_state
            rewards.append(reward)
            step += 1
            for k in range(env.num_waveguides):
                if len(buffers[k]) >= cfg.batch_size:
                    _td_update(
                        models[k],
                        targets[k],
                        optimizers[k],
                        buffers[k].sample(cfg.batch_size),
                        lambda s, kk=k: env.local_observation(s, kk),
                        cfg.gamma,
                    )
            if step % cfg.target_sync == 0:
                for m, t in zip(models, targets):
                    t.set_parameters([p.copy() for p in m.parameters()])
        log = EpisodeLog(episode=episode, mean_reward=float(np.mean(rewards)), epsilon=_epsilon(cfg, step, total_steps))
        if cfg.eval_every and (episode + 1) % cfg.eval_every == 0:
            log.eval_reward = evaluate_greedy(env, result.policy)
        result.trace.append(log)
    return result
