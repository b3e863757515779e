"""Feasibility oracles: cardinality, matroids, their intersections, p-systems and knapsacks.

Every constraint exposes ``is_feasible(S)``, ``can_extend(S, e)`` and ``rho``, an
upper bound on the size of any feasible set.  ``kind`` and ``p`` select the
approximation factor an engine may claim under the constraint.
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .core import PreconditionError

SPOT_CHECK_N = 10


class Constraint:
    kind = "abstract"
    p = 1

    @property
    def rho(self) -> int:
        raise NotImplementedError

    def is_feasible(self, S) -> bool:
        raise NotImplementedError

    def can_extend(self, S, e) -> bool:
        S = list(S)
        if int(e) in S:
            return False
        return self.is_feasible(S + [int(e)])

    def extendable(self, S, cands) -> np.ndarray:
        """Boolean mask over ``cands`` of elements that keep ``S`` feasible."""
        return np.fromiter((self.can_extend(S, c) for c in cands), dtype=bool, count=len(cands))

    def __repr__(self):
        return f"{type(self).__name__}(rho={self.rho})"


class Cardinality(Constraint):
    kind = "cardinality"

    def __init__(self, k: int):
        if int(k) != k or k < 1:
            raise PreconditionError(f"cardinality budget must be an integer >= 1, got {k}")
        self.k = int(k)

    @property
    def rho(self):
        return self.k

    def is_feasible(self, S):
        S = list(S)
        return len(set(S)) == len(S) and len(S) <= self.k

    def extendable(self, S, cands):
        ok = len(S) < self.k
        inside = set(int(s) for s in S)
        return np.array([ok and int(c) not in inside for c in cands], dtype=bool)


class MatroidConstraint(Constraint):
    """Matroid given by an independence oracle on frozensets of ids.

    On ground sets of at most ``SPOT_CHECK_N`` elements heredity and augmentation
    are verified exhaustively at construction.
    """
    kind = "matroid"

    def __init__(self, n: int, independent: Callable[[frozenset], bool], rank: Optional[int] = None,
                 check: bool = True):
        self.n = int(n)
        self._indep = independent
        if check and self.n <= SPOT_CHECK_N:
            _check_matroid(self.n, independent)
        self._rank = _greedy_maximal(self.n, independent) if rank is None else int(rank)

    @property
    def rho(self):
        return self._rank

    def is_feasible(self, S):
        S = [int(s) for s in S]
        if len(set(S)) != len(S) or any(s < 0 or s >= self.n for s in S):
            return False
        return bool(self._indep(frozenset(S)))


class PartitionMatroid(MatroidConstraint):
    """At most ``capacities[b]`` elements from each block ``b``."""

    def __init__(self, blocks, capacities):
        self.blocks = np.asarray(blocks, dtype=np.int64).ravel()
        caps = np.asarray(capacities, dtype=np.int64).ravel()
        if self.blocks.size == 0 or self.blocks.min() < 0 or self.blocks.max() >= caps.size:
            raise PreconditionError("every element needs a block id in [0, len(capacities))")
        if np.any(caps < 0):
            raise PreconditionError("block capacities must be nonnegative")
        self.capacities = caps
        self.n = self.blocks.size
        sizes = np.bincount(self.blocks, minlength=caps.size)
        self._rank = int(np.minimum(caps, sizes).sum())

    def is_feasible(self, S):
        S = [int(s) for s in S]
        if len(set(S)) != len(S) or any(s < 0 or s >= self.n for s in S):
            return False
        counts = np.bincount(self.blocks[S], minlength=self.capacities.size)
        return bool(np.all(counts <= self.capacities))

    def extendable(self, S, cands):
        S = [int(s) for s in S]
        counts = np.bincount(self.blocks[S], minlength=self.capacities.size) if S else \
            np.zeros(self.capacities.size, dtype=np.int64)
        cands = np.asarray(cands, dtype=np.int64)
        ok = counts[self.blocks[cands]] < self.capacities[self.blocks[cands]]
        if S:
            ok &= ~np.isin(cands, S)
        return ok


class PSystem(Constraint):
    """Independence system with a user-declared ``p`` and capacity bound ``rho``."""
    kind = "psystem"

    def __init__(self, n: int, independent: Callable[[frozenset], bool], p: int, rho: int):
        if p < 1 or rho < 0:
            raise PreconditionError("p-system needs p >= 1 and rho >= 0")
        self.n, self._indep, self.p, self._rho = int(n), independent, int(p), int(rho)

    @property
    def rho(self):
        return self._rho

    def is_feasible(self, S):
        S = [int(s) for s in S]
        return len(set(S)) == len(S) and bool(self._indep(frozenset(S)))


class Intersection(Constraint):
    """Feasible iff feasible in every member; ``p`` adds up over members."""
    kind = "psystem"

    def __init__(self, members: Sequence[Constraint]):
        members = list(members)
        if not members:
            raise PreconditionError("intersection needs at least one constraint")
        self.members = members
        self.p = sum(c.p for c in members)

    @property
    def rho(self):
        return min(c.rho for c in self.members)

    def is_feasible(self, S):
        S = list(S)
        return all(c.is_feasible(S) for c in self.members)

    def extendable(self, S, cands):
        ok = np.ones(len(cands), dtype=bool)
        for c in self.members:
            ok &= c.extendable(S, cands)
        return ok


class Knapsack(Constraint):
    """Total cost within budget, componentwise for ``d``-dimensional costs."""
    kind = "knapsack"
    RTOL = 1e-12

    def __init__(self, costs, budget):
        c = np.asarray(costs, dtype=np.float64)
        if c.ndim == 1:
            c = c[:, None]
        b = np.atleast_1d(np.asarray(budget, dtype=np.float64))
        if c.ndim != 2 or c.shape[1] != b.size:
            raise PreconditionError("costs must be (n,) or (n, d) with a length-d budget")
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            bad = int(np.argwhere(~(c > 0))[0][0]) if np.any(~(c > 0)) else -1
            raise PreconditionError(f"knapsack costs must be finite and > 0 (element {bad})")
        if np.any(b < 0):
            raise PreconditionError("knapsack budget must be nonnegative")
        self.costs, self.budget, self.n = c, b, c.shape[0]

    @property
    def d(self):
        return self.budget.size

    @property
    def rho(self):
        return int(min(math.ceil(b / m) for b, m in zip(self.budget, self.costs.min(axis=0))))

    def _fits(self, total):
        return np.all(total <= self.budget * (1 + self.RTOL), axis=-1)

    def is_feasible(self, S):
        S = [int(s) for s in S]
        if len(set(S)) != len(S):
            return False
        return bool(self._fits(self.costs[S].sum(axis=0)))

    def extendable(self, S, cands):
        S = [int(s) for s in S]
        cands = np.asarray(cands, dtype=np.int64)
        used = self.costs[S].sum(axis=0)
        ok = self._fits(used + self.costs[cands])
        if S:
            ok &= ~np.isin(cands, S)
        return ok

    def scalar_cost(self, e) -> float:
        """Largest budget fraction the element consumes over all dimensions."""
        with np.errstate(divide="ignore"):
            frac = self.costs[e] / self.budget
        return float(np.max(frac))


def _greedy_maximal(n, independent) -> int:
    S = []
    for e in range(n):
        if independent(frozenset(S + [e])):
            S.append(e)
    return len(S)


def _check_matroid(n, independent):
    indep = {}
    for r in range(n + 1):
        for A in itertools.combinations(range(n), r):
            indep[frozenset(A)] = bool(independent(frozenset(A)))
    if not indep[frozenset()]:
        raise PreconditionError("empty set must be independent")
    for A, ok in indep.items():
        if not ok:
            continue
        for e in A:
            if not indep[A - {e}]:
                raise PreconditionError(f"heredity fails: {sorted(A)} independent, "
                                        f"{sorted(A - {e})} not")
    sets = [A for A, ok in indep.items() if ok]
    for A in sets:
        for B in sets:
            if len(A) < len(B) and not any(indep[A | {e}] for e in B - A):
                raise PreconditionError(f"augmentation fails for {sorted(A)} and {sorted(B)}")


def cardinality_constraint(k: int) -> Cardinality:
    return Cardinality(k)


def matroid_constraint(n, independent, rank=None) -> MatroidConstraint:
    return MatroidConstraint(n, independent, rank)


def partition_matroid(blocks, capacities) -> PartitionMatroid:
    return PartitionMatroid(blocks, capacities)


def intersection_constraint(constraints) -> Intersection:
    return Intersection(constraints)


def knapsack_constraint(costs, budget) -> Knapsack:
    return Knapsack(costs, budget)


def parse_constraint(spec: str, n: int) -> Constraint:
    """Parse ``cardinality:k`` or ``knapsack:budget`` (unit costs) style specs."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "cardinality":
            return Cardinality(int(arg))
        if kind == "knapsack":
            return Knapsack(np.ones(n), float(arg))
        if kind == "partition":
            # partition:<blocks>:<cap>, round-robin element assignment
            nb, cap = (int(x) for x in arg.split(":"))
            return PartitionMatroid(np.arange(n) % nb, np.full(nb, cap))
    except ValueError as exc:
        raise PreconditionError(f"bad constraint spec {spec!r}: {exc}") from exc
    raise PreconditionError(f"unknown constraint kind {kind!r}")
