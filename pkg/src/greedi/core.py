"""Ground sets, the set-function oracle abstraction and solution bookkeeping.

Every objective in the package derives from :class:`Objective`.  Elements of a
ground set are the dense integer ids ``0 .. n-1``.  Objectives expose two
evaluation routes:

* ``evaluate(S)`` computes ``f(S)`` from scratch (one oracle call);
* an incremental protocol ``start() / gains(state, cands) / extend(state, e)``
  used by the greedy engines.  ``start`` costs one oracle call and a gain for
  ``k`` candidates costs ``k``; ``extend`` is free, since the accepted gain was
  already paid for.

Gains returned by ``gains`` must not depend on which other candidates share the
batch; the lazy and standard engines rely on this to pick bit-identical
sequences.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

TOL = 1e-9
MAX_VERIFY_N = 12
PAYLOAD_KINDS = ("vectors", "graph", "set-system", "abstract")


class GreediError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(GreediError, ValueError):
    """An operation was called outside its documented preconditions."""


class SizeLimitError(GreediError, ValueError):
    """An exhaustive routine was asked to enumerate an instance that is too large."""


class NumericalError(GreediError, ArithmeticError):
    """A factorization failed even after jitter was added."""


@dataclass(frozen=True)
class GroundSet:
    n: int
    payload_kind: str = "abstract"

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f"ground set needs n >= 1, got {self.n}")
        if self.payload_kind not in PAYLOAD_KINDS:
            raise PreconditionError(f"unknown payload kind {self.payload_kind!r}")

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.n)


@dataclass(frozen=True)
class Solution:
    elements: tuple
    value: float
    oracle_calls: int = 0
    provenance: str = ""

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise PreconditionError(f"solution elements repeat: {self.elements}")

    def __len__(self):
        return len(self.elements)

    @property
    def ids(self) -> np.ndarray:
        return np.asarray(self.elements, dtype=np.int64)

    def truncated(self, size: int, f: "Objective", provenance: Optional[str] = None):
        """First ``size`` elements, value re-evaluated under ``f``."""
        head = self.elements[:size]
        if len(head) == len(self.elements):
            return self
        return Solution(head, f.evaluate(head), self.oracle_calls + 1,
                        provenance or self.provenance)


@dataclass
class State:
    """Mutable greedy state owned by one engine run."""
    selected: list = field(default_factory=list)
    value: float = 0.0
    calls: int = 0


class Objective:
    """Set-function oracle ``f: 2^V -> R`` over ids ``0 .. n-1``.

    Subclasses implement ``_value(ids)``; the incremental protocol falls back to
    from-scratch evaluation unless a subclass overrides it.  Instances are
    immutable after construction; the call counter is guarded by a lock so that
    concurrent machines keep the global tally exact.
    """

    monotone = False
    nonnegative = False
    decomposable = False
    payload_kind = "abstract"

    def __init__(self, n: int):
        self.ground_set = GroundSet(int(n), self.payload_kind)
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self.ground_set.n

    @property
    def oracle_calls(self) -> int:
        return self._calls

    def _count(self, k: int = 1, state: Optional[State] = None):
        with self._lock:
            self._calls += k
        if state is not None:
            state.calls += k

    def _value(self, ids: np.ndarray) -> float:
        raise NotImplementedError

    def evaluate(self, S: Iterable[int]) -> float:
        ids = as_ids(S, self.n)
        self._count()
        return float(self._value(ids))

    __call__ = evaluate

    # -- incremental protocol -------------------------------------------------
    def start(self) -> State:
        state = State()
        state.value = float(self._value(np.empty(0, dtype=np.int64)))
        self._count(1, state)
        return state

    def gains(self, state: State, cands) -> np.ndarray:
        cands = np.asarray(cands, dtype=np.int64)
        base = np.asarray(state.selected, dtype=np.int64)
        out = np.empty(len(cands))
        for j, c in enumerate(cands):
            out[j] = self._value(np.append(base, c)) - state.value
        self._count(len(cands), state)
        return out

    def extend(self, state: State, e: int):
        state.selected.append(int(e))
        state.value = float(self._value(np.asarray(state.selected, dtype=np.int64)))

    def restrict(self, D) -> "Objective":
        raise PreconditionError(f"{type(self).__name__} has no local (restricted) evaluation")


class SetFunction(Objective):
    """Wraps a plain Python callable on frozensets; handy for tests and oracles."""

    def __init__(self, n, fn, monotone=False, nonnegative=False):
        super().__init__(n)
        self._fn = fn
        self.monotone = monotone
        self.nonnegative = nonnegative

    def _value(self, ids):
        return float(self._fn(frozenset(int(i) for i in ids)))


def as_ids(S, n: Optional[int] = None) -> np.ndarray:
    """Validate an element collection and return it as an int64 id array."""
    ids = np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64).ravel()
    if ids.size:
        if ids.min() < 0 or (n is not None and ids.max() >= n):
            raise PreconditionError(f"element ids must lie in [0, {n})")
        if np.unique(ids).size != ids.size:
            raise PreconditionError("element set contains duplicates")
    return ids


def marginal_gain(f: Objective, S, e: int) -> float:
    """``f(S + e) - f(S)`` via two from-scratch evaluations."""
    S = [int(s) for s in S]
    if int(e) in S:
        raise PreconditionError(f"element {e} already in S")
    return f.evaluate(S + [int(e)]) - f.evaluate(S)


class StructureCheck(NamedTuple):
    holds: bool
    witness: Optional[tuple]


def _all_values(f: Objective, n: int) -> np.ndarray:
    if n > MAX_VERIFY_N:
        raise SizeLimitError(f"exhaustive verification limited to n <= {MAX_VERIFY_N}, got {n}")
    vals = np.empty(1 << n)
    for mask in range(1 << n):
        vals[mask] = f.evaluate([i for i in range(n) if mask >> i & 1])
    return vals


def _mask_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _subset_arg(vals: np.ndarray, n: int, better) -> np.ndarray:
    """For every mask B, the submask A of B whose value is best under ``better``.

    Ties go to the numerically smallest submask.
    """
    masks = np.arange(1 << n)
    arg = masks.copy()
    for i in range(n):
        bit = 1 << i
        ms = masks[(masks & bit) != 0]
        cand, cur = arg[ms ^ bit], arg[ms]
        take = better(vals[cand], vals[cur]) | ((vals[cand] == vals[cur]) & (cand < cur))
        arg[ms[take]] = cand[take]
    return arg


def verify_submodular(f: Objective, gs: Optional[GroundSet] = None, tol: float = TOL) -> StructureCheck:
    """Exhaustively check diminishing returns over every ``A <= B``, ``e not in B``.

    Returns ``(True, None)`` or ``(False, (A, B, e))`` for the violation with the
    smallest ``B`` (as a bitmask), then smallest ``e``.
    """
    n = (gs or f.ground_set).n
    vals = _all_values(f, n)
    best = None
    for e in range(n):
        bit = 1 << e
        masks = np.array([s for s in range(1 << n) if not s & bit])
        gain = np.full(1 << n, np.inf)
        gain[masks] = vals[masks | bit] - vals[masks]
        # restrict the submask search to masks without e: gain is +inf elsewhere
        arg = _subset_arg(gain, n, lambda a, b: a < b)
        viol = masks[gain[arg[masks]] < gain[masks] - tol]
        if viol.size:
            B = int(viol.min())
            if best is None or (B, e) < (best[1], best[2]):
                best = (int(arg[B]), B, e)
    if best is None:
        return StructureCheck(True, None)
    A, B, e = best
    return StructureCheck(False, (_mask_set(A), _mask_set(B), e))


def verify_monotone(f: Objective, gs: Optional[GroundSet] = None, tol: float = TOL) -> StructureCheck:
    """Exhaustively check ``f(A) <= f(B)`` for every ``A <= B``; witness ``(A, B)``."""
    n = (gs or f.ground_set).n
    vals = _all_values(f, n)
    arg = _subset_arg(vals, n, lambda a, b: a > b)
    viol = np.nonzero(vals[arg] > vals + tol)[0]
    if viol.size == 0:
        return StructureCheck(True, None)
    B = int(viol.min())
    return StructureCheck(False, (_mask_set(int(arg[B])), _mask_set(B)))


def subsets(ids: Sequence[int], max_size: Optional[int] = None):
    """All subsets of ``ids`` (sorted tuples) up to ``max_size``, by size then lexicographically."""
    ids = sorted(int(i) for i in ids)
    top = len(ids) if max_size is None else min(max_size, len(ids))
    for r in range(top + 1):
        yield from itertools.combinations(ids, r)
