"""Single-machine solvers: greedy, lazy greedy, constrained, cost-benefit and RandomGreedy.

All engines break ties toward the smallest element id and report the oracle
calls they spent in ``Solution.oracle_calls``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .constraints import Cardinality, Constraint, Knapsack
from .core import Objective, PreconditionError, Solution, State

# Approximation factors per (engine family, constraint kind); p-systems use 1/(p+1).
TAU = {
    ("greedy", "cardinality"): 1 - 1 / math.e,
    ("greedy", "matroid"): 0.5,
    ("costbenefit", "knapsack"): 1 - 1 / math.sqrt(math.e),
    ("costbenefit", "cardinality"): 1 - 1 / math.sqrt(math.e),
    ("randomgreedy", "cardinality"): 1 / math.e,
}


def _ground(f: Objective, ground) -> np.ndarray:
    if ground is None:
        return np.arange(f.n)
    g = np.unique(np.asarray(list(ground) if not isinstance(ground, np.ndarray) else ground,
                             dtype=np.int64))
    if g.size and (g[0] < 0 or g[-1] >= f.n):
        raise PreconditionError(f"ground ids must lie in [0, {f.n})")
    return g


def _budget(budget, constraint) -> float:
    if budget is None:
        if constraint is None:
            raise PreconditionError("a budget or a constraint is required")
        return constraint.rho
    if budget < 0:
        raise PreconditionError(f"budget must be >= 0, got {budget}")
    if constraint is not None and budget > constraint.rho:
        raise PreconditionError(f"budget {budget} exceeds constraint capacity {constraint.rho}")
    return budget


def _solution(state: State, name: str) -> Solution:
    return Solution(tuple(state.selected), float(state.value), state.calls, name)


def _run_greedy(f, ground, budget, constraint, name="greedy") -> Solution:
    state = f.start()
    alive = ground.copy()
    while len(state.selected) < budget and alive.size:
        if constraint is not None:
            alive = alive[constraint.extendable(state.selected, alive)]
            if not alive.size:
                break
        g = f.gains(state, alive)
        j = int(np.argmax(g))  # first maximum = smallest id, since alive is sorted
        if not f.monotone and g[j] < 0:
            break
        e = int(alive[j])
        f.extend(state, e)
        alive = np.delete(alive, j)
    return _solution(state, name)


def greedy(f: Objective, constraint: Optional[Constraint] = None, ground=None,
           budget: Optional[int] = None) -> Solution:
    """Repeatedly add the feasible element of largest marginal gain.

    ``budget`` defaults to ``constraint.rho``.  Monotone objectives fill the
    budget; non-monotone ones stop once every gain is negative.
    """
    return _run_greedy(f, _ground(f, ground), _budget(budget, constraint), constraint)


def lazy_greedy(f: Objective, constraint: Optional[Constraint] = None, ground=None,
                budget: Optional[int] = None) -> Solution:
    """Greedy with stale upper bounds kept in a priority queue.

    Entries are ``(-gain, id, stamp)``; an entry is accepted only when its gain
    was computed against the current selection, so the sequence matches
    :func:`greedy` exactly for submodular ``f``.
    """
    ground = _ground(f, ground)
    budget = _budget(budget, constraint)
    state = f.start()
    if budget <= 0 or not ground.size:
        return _solution(state, "lazy")
    cands = ground
    if constraint is not None:
        cands = ground[constraint.extendable([], ground)]
    g = f.gains(state, cands)
    heap = [(-float(v), int(e), 0) for v, e in zip(g, cands)]
    heapq.heapify(heap)
    while heap and len(state.selected) < budget:
        neg, e, stamp = heap[0]
        if constraint is not None and not constraint.can_extend(state.selected, e):
            heapq.heappop(heap)
            continue
        t = len(state.selected)
        if stamp == t:
            if not f.monotone and -neg < 0:
                break
            heapq.heappop(heap)
            f.extend(state, e)
            continue
        fresh = float(f.gains(state, [e])[0])
        heapq.heapreplace(heap, (-fresh, e, t))
    return _solution(state, "lazy")


def constrained_greedy(f: Objective, constraint: Constraint, ground=None) -> Solution:
    """Greedy that keeps adding until no element can extend the set feasibly."""
    if constraint is None:
        raise PreconditionError("constrained_greedy needs a constraint")
    return _run_greedy(f, _ground(f, ground), math.inf, constraint, "constrained")


def _ratio_greedy(f, ground, knap: Knapsack, use_cost: bool) -> Solution:
    state = f.start()
    alive = ground.copy()
    with np.errstate(divide="ignore"):
        scale = (knap.costs / knap.budget).max(axis=1) if use_cost else None
    while alive.size:
        alive = alive[knap.extendable(state.selected, alive)]
        if not alive.size:
            break
        g = f.gains(state, alive)
        score = g / scale[alive] if use_cost else g
        j = int(np.argmax(score))
        if not f.monotone and g[j] < 0:
            break
        f.extend(state, int(alive[j]))
        alive = np.delete(alive, j)
    return _solution(state, "costbenefit")


def cost_benefit_greedy(f: Objective, knapsack: Constraint, ground=None) -> Solution:
    """Better of gain-greedy and gain-per-cost greedy, both skipping unaffordable elements."""
    if isinstance(knapsack, Cardinality):
        knapsack = Knapsack(np.ones(f.n), knapsack.k)
    if not isinstance(knapsack, Knapsack):
        raise PreconditionError("cost_benefit_greedy needs a knapsack constraint")
    ground = _ground(f, ground)
    a = _ratio_greedy(f, ground, knapsack, use_cost=False)
    b = _ratio_greedy(f, ground, knapsack, use_cost=True)
    best = a if a.value >= b.value else b
    return Solution(best.elements, best.value, a.oracle_calls + b.oracle_calls, "costbenefit")


def random_greedy(f: Objective, k: int, ground=None, rng=None,
                  constraint: Optional[Constraint] = None) -> Solution:
    """RandomGreedy: each of ``k`` rounds adds a uniform pick from the top-``k`` gains.

    Elements with nonpositive gain are displaced by zero-gain dummies, so a
    round may add nothing.
    """
    if k < 0:
        raise PreconditionError(f"k must be >= 0, got {k}")
    rng = np.random.default_rng(rng)
    ground = _ground(f, ground)
    state = f.start()
    alive = ground.copy()
    for _ in range(int(k)):
        cands = alive
        if constraint is not None:
            cands = alive[constraint.extendable(state.selected, alive)]
        pick = int(rng.integers(k))
        if not cands.size:
            continue
        g = f.gains(state, cands)
        order = np.lexsort((cands, -g))
        top = order[:k]
        top = top[g[top] > 0]
        if pick >= top.size:
            continue  # a dummy was drawn
        e = int(cands[top[pick]])
        f.extend(state, e)
        alive = alive[alive != e]
    return _solution(state, "randomgreedy")


@dataclass(frozen=True)
class Engine:
    """Named solver with the approximation factor it may claim per constraint kind."""
    name: str
    family: str
    run: Callable

    def solve(self, f, constraint=None, ground=None, budget=None, rng=None) -> Solution:
        return self.run(f, constraint, ground, budget, rng)

    def tau(self, constraint: Optional[Constraint] = None) -> float:
        kind = "cardinality" if constraint is None else constraint.kind
        if kind == "psystem" and self.family == "greedy":
            return 1.0 / (constraint.p + 1)
        try:
            return TAU[(self.family, kind)]
        except KeyError:
            raise PreconditionError(f"engine {self.name} has no guarantee under {kind}") from None

    @property
    def randomized(self) -> bool:
        return self.family == "randomgreedy"


def _solve_random(f, c, g, b, rng):
    if b is None:
        b = _budget(b, c)
    return random_greedy(f, b, g, rng, c if not isinstance(c, Cardinality) else None)


ENGINES = {
    "greedy": Engine("greedy", "greedy", lambda f, c, g, b, rng: greedy(f, c, g, b)),
    "lazy": Engine("lazy", "greedy", lambda f, c, g, b, rng: lazy_greedy(f, c, g, b)),
    "constrained": Engine("constrained", "greedy",
                          lambda f, c, g, b, rng: constrained_greedy(f, c or Cardinality(b), g)
                          if b is None or c is None else greedy(f, c, g, b)),
    "costbenefit": Engine("costbenefit", "costbenefit",
                          lambda f, c, g, b, rng: cost_benefit_greedy(f, c or Cardinality(b), g)),
    "randomgreedy": Engine("randomgreedy", "randomgreedy", _solve_random),
}


def get_engine(name) -> Engine:
    if isinstance(name, Engine):
        return name
    try:
        return ENGINES[name]
    except KeyError:
        raise PreconditionError(f"unknown engine {name!r}; choose from {sorted(ENGINES)}") from None
