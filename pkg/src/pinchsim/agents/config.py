"""Shared hyperparameters for the value- and policy-based trainers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class AgentConfig:
    gamma: float = 0.95
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_fraction: float = 0.5  # fraction of total steps to anneal over
    target_sync: int = 100  # hard target update period [env steps]
    buffer_capacity: int = 10_000
    batch_size: int = 64
    lr: float = 1e-3  # value / critic learning rate
    actor_lr: float = 1e-4
    noise_start_frac: float = 0.1  # exploration noise sigma as a fraction of guide length
    noise_end_frac: float = 0.01
    actor_reg: float = 3e-2  # pre-squash pull toward zero, keeps tanh responsive
    episodes: int = 500
    episode_length: int = 10
    qos_penalty: float = 10.0
    hidden: tuple[int, ...] = (64, 64)
    seed: int = 0
    eval_every: int = 25  # episodes between greedy evaluations (0 = never)

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        for name in ("epsilon_start", "epsilon_end"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.target_sync < 1:
            raise ValueError("target_sync must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.buffer_capacity < self.batch_size:
            raise ValueError("buffer_capacity must be >= batch_size")
