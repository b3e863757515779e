"""Exhaustive optimum, the adversarial partition instance, and bound checks."""
from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constraints import Constraint
from .core import Objective, PreconditionError, SizeLimitError, Solution, TOL
from .objectives import Coverage, SetSystemDataset
from .partition import Partition


def _enumerable(n: int, top: int) -> bool:
    return n <= 14 or (n <= 20 and top <= 4)


def brute_force_opt(f: Objective, constraint: Optional[Constraint] = None, ground=None,
                    k: Optional[int] = None) -> Solution:
    """Exact maximizer over feasible subsets of ``ground``.

    Size is capped by ``k`` or ``constraint.rho``.  Values within ``1e-9`` of
    the best count as ties and go to the lexicographically smallest sorted tuple.
    """
    ids = sorted(range(f.n)) if ground is None else sorted({int(e) for e in ground})
    top = len(ids)
    if k is not None:
        top = min(top, int(k))
    if constraint is not None:
        top = min(top, constraint.rho)
    if not _enumerable(len(ids), top):
        raise SizeLimitError(f"brute force limited to n <= 14, or n <= 20 with size <= 4; "
                             f"got n={len(ids)}, size={top}")
    best, best_val, best_v, calls = (), None, None, 0
    for r in range(top + 1):
        for S in itertools.combinations(ids, r):
            if constraint is not None and not constraint.is_feasible(S):
                continue
            v = f.evaluate(S)
            calls += 1
            if best_val is None or v > best_val + TOL:
                best, best_val, best_v = S, v, v
            elif v >= best_val - TOL and S < best:
                best, best_v = S, v
    return Solution(best, float(best_v), calls, "brute_force")


@dataclass(frozen=True)
class WorstCaseInstance:
    """Coverage instance on which a two-round exact protocol loses a factor ``min(m, k)``.

    Bit ``(i, j)`` is item ``i*k + j``.  ``X[i][j]`` covers that bit alone and
    ``Y[i]`` covers the whole row ``i``.  All X ids precede all Y ids.
    """
    m: int
    k: int
    objective: Coverage
    partition: Partition

    def x(self, i: int, j: int) -> int:
        return i * self.k + j

    def y(self, i: int) -> int:
        return self.m * self.k + i

    @property
    def opt_value(self) -> int:
        return self.k * min(self.m, self.k)


def worst_case_instance(m: int, k: int) -> WorstCaseInstance:
    if m < 2 or k < 2:
        raise PreconditionError("worst-case instance needs m >= 2 and k >= 2")
    sets = [[i * k + j] for i in range(m) for j in range(k)]
    sets += [[i * k + j for j in range(k)] for i in range(m)]
    ss = SetSystemDataset.from_sets(sets)
    assignment = np.concatenate([np.repeat(np.arange(m), k), np.arange(m)])
    return WorstCaseInstance(m, k, Coverage(ss), Partition(m, assignment, 0))


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    bound_value: float
    achieved: float
    satisfied: bool
    fingerprint: str = ""

    def line(self) -> str:
        status = "PASS" if self.satisfied else "FAIL"
        return (f"{status} {self.bound_name} achieved={self.achieved!r} "
                f"bound={self.bound_value!r} instance={self.fingerprint}")


BOUND_NAMES = ("greedy", "greedy_budget", "two_round_exact", "greedi", "greedi_general")


def bound_factor(name: str, k=None, q=None, kappa=None, m=None, tau=None, rho=None) -> float:
    """Multiplier applied to OPT by each named guarantee.

    greedy: 1 - 1/e; greedy_budget: 1 - exp(-q/k); two_round_exact: 1/min(m, k);
    greedi: (1 - exp(-kappa/k)) / min(m, k); greedi_general: tau / min(m, rho).
    """
    def need(**kw):
        missing = [a for a, v in kw.items() if v is None]
        if missing:
            raise PreconditionError(f"bound {name} needs {', '.join(missing)}")

    if name == "greedy":
        return 1 - 1 / math.e
    if name == "greedy_budget":
        need(q=q, k=k)
        return 1 - math.exp(-q / k)
    if name == "two_round_exact":
        need(m=m, k=k)
        return 1 / min(m, k)
    if name == "greedi":
        need(kappa=kappa, k=k, m=m)
        return (1 - math.exp(-kappa / k)) / min(m, k)
    if name == "greedi_general":
        need(tau=tau, m=m, rho=rho)
        return tau / min(m, rho)
    raise PreconditionError(f"unknown bound {name!r}; choose one of {', '.join(BOUND_NAMES)}")


def check_bound(name: str, achieved: float, opt: float, fingerprint: str = "", **params) -> BoundReport:
    bound = bound_factor(name, **params) * opt
    return BoundReport(name, float(bound), float(achieved), bool(achieved >= bound - TOL), fingerprint)


def fingerprint(*parts) -> str:
    h = hashlib.sha1()
    for p in parts:
        h.update(np.asarray(p).tobytes() if isinstance(p, np.ndarray) else repr(p).encode())
    return h.hexdigest()[:12]
