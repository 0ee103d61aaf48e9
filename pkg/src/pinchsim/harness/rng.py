"""Split-stream random numbers.

Every consumer derives its own generator from (seed, label), so adding a
new labeled stream never perturbs the draws of existing ones. Labels are
hashed with SHA-256, which keeps the derivation stable across platforms
and Python builds.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _label_words(label: str) -> list[int]:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for one (seed, label) pair."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *_label_words(label)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


class SeedBank:
    """Hands out labeled streams for one run and rejects duplicate labels."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._used: set[str] = set()

    def stream(self, label: str) -> np.random.Generator:
        if label in self._used:
            raise ValueError(f"rng stream label {label!r} already used in this run")
        self._used.add(label)
        return rng_stream(self.seed, label)
