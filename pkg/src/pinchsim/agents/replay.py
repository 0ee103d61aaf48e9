"""Experience replay with strict FIFO eviction and uniform sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: Any
    reward: float
    next_state: np.ndarray
    done: bool

    def __post_init__(self) -> None:
        if not math.isfinite(self.reward):
            raise ValueError(f"non-finite reward {self.reward}")


class ReplayBuffer:
    def __init__(self, capacity: int, rng: np.random.Generator):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._rng = rng
        self._ring: list[Transition] = []
        self._head = 0

    def push(self, transition: Transition) -> None:
        if len(self._ring) < self.capacity:
            self._ring.append(transition)
        else:
            self._ring[self._head] = transition
            self._head = (self._head + 1) % self.capacity

    def sample(self, batch_size: int) -> list[Transition]:
        if batch_size > len(self._ring):
            raise ValueError("not enough stored transitions")
        idx = self._rng.integers(0, len(self._ring), size=batch_size)
        return [self._ring[i] for i in idx]

    def __len__(self) -> int:
        return len(self._ring)

    def __iter__(self):
        return iter(self._ring)
