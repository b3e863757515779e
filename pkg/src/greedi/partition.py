"""Seeded random streams and the element-to-machine partition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PreconditionError

# spawn-key prefixes, one per consumer of randomness
KEY_PARTITION = 0
KEY_MACHINE = 1
KEY_MERGE = 2
KEY_EVAL_SUBSET = 3
KEY_BASELINE = 4
KEY_CENTRAL = 5


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key)``; identical on every platform."""
    if seed is None or int(seed) < 0:
        raise PreconditionError(f"seed must be a nonnegative integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


@dataclass(frozen=True, eq=False)
class Partition:
    m: int
    assignment: np.ndarray
    seed: int = 0

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        if self.m < 1:
            raise PreconditionError(f"need m >= 1 machines, got {self.m}")
        if a.ndim != 1 or (a.size and (a.min() < 0 or a.max() >= self.m)):
            raise PreconditionError("assignment must map every element to [0, m)")
        object.__setattr__(self, "assignment", a)

    @property
    def n(self) -> int:
        return self.assignment.size

    def blocks(self, ground=None) -> list:
        """Sorted element ids of each machine, optionally restricted to ``ground``."""
        ids = np.arange(self.n) if ground is None else np.unique(np.asarray(ground, dtype=np.int64))
        owner = self.assignment[ids]
        return [ids[owner == i] for i in range(self.m)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.m)

    def __eq__(self, other):
        return isinstance(other, Partition) and self.m == other.m and \
            np.array_equal(self.assignment, other.assignment)


def partition_uniform(n: int, m: int, seed: int = 0) -> Partition:
    """Assign each of ``n`` elements to one of ``m`` machines independently and uniformly."""
    if m < 1:
        raise PreconditionError(f"need m >= 1 machines, got {m}")
    if n < 1:
        raise PreconditionError(f"need n >= 1 elements, got {n}")
    a = stream(seed, KEY_PARTITION).integers(m, size=n) if m > 1 else np.zeros(n, dtype=np.int64)
    return Partition(m, a, seed)
