"""
Seedable counter-based random generator.

Wraps numpy's Philox bit generator. Every stream is identified by the root
seed plus a path of names, so ``Rng(7).child("split")`` always yields the same
draws regardless of what other modules consumed before it.
"""
from __future__ import annotations

import hashlib
from typing import Optional, Sequence

import numpy as np


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode("utf-8"), digest_size=4).digest(), "little")


class Rng:
    def __init__(self, seed: int, path: Sequence[str] = ()):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(seed)
        self.path = tuple(path)
        sequence = np.random.SeedSequence(
            entropy=self.seed,
            spawn_key=tuple(_name_key(p) for p in self.path),
        )
        self._generator = np.random.Generator(np.random.Philox(sequence))

    def child(self, name: str) -> "Rng":
        """Independent stream derived from this one's seed and path."""
        return Rng(self.seed, self.path + (name,))

    @property
    def name(self) -> str:
        return "/".join(self.path) or "root"

    def random(self, shape) -> np.ndarray:
        return self._generator.random(shape)

    def uniform(self, low: float, high: float, shape) -> np.ndarray:
        return self._generator.uniform(low, high, shape)

    def normal(self, loc: float, scale: float, shape=None):
        return self._generator.normal(loc, scale, shape)

    def integers(self, low: int, high: Optional[int] = None, size=None):
        return self._generator.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def choice(self, n: int, size: int, replace: bool = True) -> np.ndarray:
        return self._generator.choice(n, size=size, replace=replace)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, path={self.name})"
