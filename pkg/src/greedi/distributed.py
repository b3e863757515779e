"""Two-round distributed maximization over simulated machines.

Machines are simulated by a thread pool over shared immutable objectives; each
machine only ever sees the element ids of its own block.  Randomness for each
machine and for the merge stage comes from its own ``(seed, key)`` stream, so
results do not depend on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from .constraints import Constraint
from .core import Objective, PreconditionError, Solution
from .engines import Engine, get_engine
from .partition import (KEY_BASELINE, KEY_EVAL_SUBSET, KEY_MACHINE, KEY_MERGE, Partition,
                        partition_uniform, stream)
from .verify import brute_force_opt

BASELINES = ("random_random", "random_greedy", "greedy_merge", "greedy_max")


@dataclass(frozen=True)
class GreediConfig:
    m: int
    k: int
    kappa: Optional[int] = None
    kappa_factor: float = 1.0
    engine: str = "lazy"
    decomposable: bool = False
    seed: int = 0
    workers: int = 1
    eval_subset_size: Optional[int] = None

    def __post_init__(self):
        if self.m < 1:
            raise PreconditionError(f"need m >= 1 machines, got {self.m}")
        if self.k < 1:
            raise PreconditionError(f"need k >= 1, got {self.k}")
        if self.kappa is None and not self.kappa_factor > 0:
            raise PreconditionError(f"kappa_factor must be > 0, got {self.kappa_factor}")
        if self.kappa is not None and self.kappa < 1:
            raise PreconditionError(f"kappa must be >= 1, got {self.kappa}")
        if self.workers < 1:
            raise PreconditionError(f"workers must be >= 1, got {self.workers}")

    @property
    def budget(self) -> int:
        """Per-machine and merge budget; ``ceil(kappa_factor * k)`` unless given."""
        if self.kappa is not None:
            return int(self.kappa)
        return max(1, math.ceil(self.kappa_factor * self.k - 1e-9))


@dataclass
class GreediTrace:
    m: int
    k: int
    kappa: int
    seed: int
    engine: str
    machines: List[Solution] = field(default_factory=list)
    best_machine: int = 0
    merged: tuple = ()
    merge: Optional[Solution] = None
    source: str = "machine"
    final_kappa: Optional[Solution] = None
    final: Optional[Solution] = None

    @property
    def shipped(self) -> int:
        return len(self.merged)

    @property
    def oracle_calls(self) -> int:
        return sum(s.oracle_calls for s in self.machines) + \
            (self.merge.oracle_calls if self.merge else 0)

    def to_lines(self) -> List[str]:
        def sol(tag, s, extra=""):
            ids = ",".join(str(e) for e in s.elements)
            return f"{tag}{extra} size={len(s)} value={s.value!r} calls={s.oracle_calls} ids={ids}"

        lines = [f"run m={self.m} k={self.k} kappa={self.kappa} seed={self.seed} engine={self.engine}"]
        lines += [sol("machine", s, f" index={i}") for i, s in enumerate(self.machines)]
        lines.append(f"merged shipped={self.shipped} ids={','.join(map(str, self.merged))}")
        if self.merge is not None:
            lines.append(sol("merge", self.merge))
        lines.append(f"select source={self.source} best_machine={self.best_machine}")
        if self.final_kappa is not None:
            lines.append(sol("final_kappa", self.final_kappa))
        if self.final is not None:
            lines.append(sol("final", self.final))
        return lines

    @classmethod
    def from_lines(cls, lines) -> "GreediTrace":
        def fields(line):
            tag, *rest = line.split(" ")
            return tag, dict(kv.split("=", 1) for kv in rest)

        def sol(kv):
            ids = tuple(int(x) for x in kv["ids"].split(",") if x)
            return Solution(ids, float(kv["value"]), int(kv["calls"]))

        lines = [l for l in lines if l.strip()]
        tag, kv = fields(lines[0])
        if tag != "run":
            raise PreconditionError(f"trace must start with a run record, got {tag!r}")
        tr = cls(int(kv["m"]), int(kv["k"]), int(kv["kappa"]), int(kv["seed"]), kv["engine"])
        for line in lines[1:]:
            tag, kv = fields(line)
            if tag == "machine":
                tr.machines.append(sol(kv))
            elif tag == "merged":
                tr.merged = tuple(int(x) for x in kv["ids"].split(",") if x)
            elif tag == "merge":
                tr.merge = sol(kv)
            elif tag == "select":
                tr.source, tr.best_machine = kv["source"], int(kv["best_machine"])
            elif tag == "final_kappa":
                tr.final_kappa = sol(kv)
            elif tag == "final":
                tr.final = sol(kv)
            else:
                raise PreconditionError(f"unknown trace record {tag!r}")
        return tr


def _map(fn: Callable, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _blocks(f, ground, m, seed, partition) -> list:
    if partition is None:
        partition = partition_uniform(f.n, m, seed)
    elif partition.m != m or partition.n != f.n:
        raise PreconditionError("partition does not match the objective size or machine count")
    return partition.blocks(None if ground is None else ground)


def _local(f: Objective, block, local: bool) -> Optional[Objective]:
    """Objective a machine optimizes: restricted to its block in local mode."""
    if not local:
        return f
    if len(block) == 0:
        return None
    return f.restrict(block)


def _solve(engine: Engine, f, ground, budget, constraint, seed, key) -> Solution:
    if f is None:
        return Solution((), 0.0, 0, engine.name)
    return engine.solve(f, constraint, ground, budget, stream(seed, *key))


def _two_round(f, ground, m, seed, partition, engine, budget, constraint, workers,
               local=False, eval_subset_size=None, k=None):
    """Core of the protocol; returns the trace with ``final_kappa`` filled in."""
    blocks = _blocks(f, ground, m, seed, partition)
    engine = get_engine(engine)

    def machine(i):
        return _solve(engine, _local(f, blocks[i], local), blocks[i], budget, constraint,
                      seed, (KEY_MACHINE, i))

    sols = _map(machine, list(range(m)), workers)
    merged = tuple(e for s in sols for e in s.elements)

    if local and f.decomposable:
        n = f.n if ground is None else len(np.unique(np.asarray(ground)))
        size = eval_subset_size or math.ceil(n / m)
        pool = np.arange(f.n) if ground is None else np.unique(np.asarray(ground, dtype=np.int64))
        U = np.sort(stream(seed, KEY_EVAL_SUBSET).choice(pool, size=min(size, pool.size),
                                                          replace=False))
        judge = f.restrict(U)
    else:
        judge = f
    # machine values are comparable only under a common evaluator
    scores = [s.value if judge is f and not local else judge.evaluate(s.elements) for s in sols]
    best = int(np.argmax(scores))
    ob = _solve(engine, judge, np.asarray(merged, dtype=np.int64), budget, constraint,
                seed, (KEY_MERGE,))
    tr = GreediTrace(m, k if k is not None else budget, budget, seed, engine.name, sols, best,
                     merged, ob)
    if ob.value > scores[best]:
        tr.source, win = "merge", ob
    else:
        tr.source, win = "machine", sols[best]
    tr.final_kappa = win if judge is f and not local else \
        Solution(win.elements, f.evaluate(win.elements), win.oracle_calls, win.provenance)
    return tr, judge, engine


def greedi(f: Objective, ground=None, config: GreediConfig = None, partition: Optional[Partition] = None,
           constraint: Optional[Constraint] = None):
    """Two-round distributed greedy; returns ``(solution of size <= k, trace)``.

    Each machine selects ``kappa`` elements from its block, the union is
    greedily reduced to ``kappa`` elements again, and the better of the best
    machine solution and the merge solution wins.  When ``kappa > k`` the winner
    is truncated to its first ``k`` elements; when ``kappa < k`` the merge stage
    is re-run with budget ``k``.
    """
    if config is None:
        raise PreconditionError("greedi needs a GreediConfig")
    kappa = config.budget
    tr, judge, engine = _two_round(f, ground, config.m, config.seed, partition, config.engine, kappa,
                                   constraint, config.workers, config.decomposable,
                                   config.eval_subset_size, config.k)
    k = config.k
    if k <= kappa:
        win = tr.final_kappa
        head = win.elements[:k]
        value = win.value if len(head) == len(win.elements) else f.evaluate(head)
        final = Solution(head, value, tr.oracle_calls, "greedi")
    else:
        ob_k = _solve(engine, judge, np.asarray(tr.merged, dtype=np.int64), k, constraint,
                      config.seed, (KEY_MERGE,))
        cands = [tr.final_kappa, Solution(ob_k.elements, f.evaluate(ob_k.elements))]
        pick = max(cands, key=lambda s: s.value)
        final = Solution(pick.elements, pick.value, tr.oracle_calls + ob_k.oracle_calls, "greedi")
    tr.final = final
    return final, tr


def greedi_decomposable(f: Objective, ground=None, config: GreediConfig = None,
                        partition: Optional[Partition] = None):
    """GreeDi where machine ``i`` optimizes ``f`` restricted to its block and the merge
    stage optimizes ``f`` restricted to a seeded uniform subset of size ``ceil(n/m)``."""
    if config is None:
        raise PreconditionError("greedi_decomposable needs a GreediConfig")
    return greedi(f, ground, replace(config, decomposable=True), partition)


def greedi_general(f: Objective, ground=None, constraint: Constraint = None, engine="greedy",
                   m: int = 1, seed: int = 0, partition: Optional[Partition] = None, workers: int = 1,
                   local: bool = False):
    """Two rounds of a black-box constrained engine; returns ``(solution, trace)``."""
    if constraint is None:
        raise PreconditionError("greedi_general needs a constraint")
    tr, _, _ = _two_round(f, ground, m, seed, partition, engine, None, constraint, workers,
                          local, None, constraint.rho)
    tr.final = tr.final_kappa
    final = Solution(tr.final.elements, tr.final.value, tr.oracle_calls, "greedi_general")
    return final, tr


def baseline(kind: str, f: Objective, ground=None, m: int = 1, k: int = 1, seed: int = 0,
             engine="lazy", partition: Optional[Partition] = None, local: bool = False,
             workers: int = 1, machines: Optional[List[Solution]] = None) -> Solution:
    """Naive two-round protocols over the same partition GreeDi would use.

    random_random: k random elements per machine, k random among their union.
    random_greedy: k random elements per machine, greedy over the union.
    greedy_merge: ``max(1, k // m)`` greedy elements per machine, union truncated to k.
    greedy_max: k greedy elements per machine, best machine wins.

    ``machines`` lets greedy_max reuse first-round solutions of a GreeDi run
    with ``kappa == k`` on the same partition, engine and seed; those runs are
    identical to the ones it would make.
    """
    if kind not in BASELINES:
        raise PreconditionError(f"unknown baseline {kind!r}; choose from {', '.join(BASELINES)}")
    if m < 1 or k < 1:
        raise PreconditionError("baseline needs m >= 1 and k >= 1")
    blocks = _blocks(f, ground, m, seed, partition)
    eng = get_engine(engine)

    if kind in ("random_random", "random_greedy"):
        picks = []
        for i, b in enumerate(blocks):
            rng = stream(seed, KEY_BASELINE, 0, i)
            picks.append(np.sort(rng.choice(b, size=min(k, b.size), replace=False)) if b.size else b)
        union = np.concatenate(picks) if picks else np.empty(0, dtype=np.int64)
        if kind == "random_random":
            rng = stream(seed, KEY_BASELINE, 1)
            S = tuple(int(e) for e in rng.choice(union, size=min(k, union.size), replace=False))
            return Solution(S, f.evaluate(S), 1, kind)
        s = _solve(eng, f, union, k, None, seed, (KEY_BASELINE, 2))
        return Solution(s.elements, s.value, s.oracle_calls, kind)

    per = max(1, k // m) if kind == "greedy_merge" else k

    def machine(i):
        return _solve(eng, _local(f, blocks[i], local), blocks[i], per, None, seed, (KEY_MACHINE, i))

    if machines is not None and kind == "greedy_max":
        if len(machines) != m:
            raise PreconditionError(f"got {len(machines)} machine solutions for m={m}")
        sols = list(machines)
    else:
        sols = _map(machine, list(range(m)), workers)
    calls = sum(s.oracle_calls for s in sols)
    if kind == "greedy_merge":
        S = tuple(e for s in sols for e in s.elements)[:k]
    else:
        vals = [s.value if not local else f.evaluate(s.elements) for s in sols]
        S = sols[int(np.argmax(vals))].elements
    return Solution(S, f.evaluate(S), calls + 1, kind)


def naive_kround_greedy(f: Objective, ground=None, m: int = 1, k: int = 1, seed: int = 0,
                        partition: Optional[Partition] = None):
    """Synchronized protocol: every round each machine proposes its best local
    element and the coordinator keeps the overall best.

    Returns ``(solution, rounds, messages)``; the selection equals centralized greedy.
    """
    blocks = _blocks(f, ground, m, seed, partition)
    state = f.start()
    alive = [b.copy() for b in blocks]
    rounds = messages = 0
    for _ in range(k):
        props = []
        for i, b in enumerate(alive):
            messages += 1
            if b.size:
                g = f.gains(state, b)
                j = int(np.argmax(g))
                props.append((-g[j], int(b[j]), i, j))
        rounds += 1
        if not props:
            break
        neg, e, i, j = min(props)
        if not f.monotone and -neg < 0:
            break
        f.extend(state, e)
        alive[i] = np.delete(alive[i], j)
    sol = Solution(tuple(state.selected), state.value, state.calls, "kround")
    return sol, rounds, messages


MAX_EXACT_BLOCK = 14


def exact_two_round(f: Objective, ground=None, m: int = 1, k: int = 1, seed: int = 0,
               partition: Optional[Partition] = None):
    """Two rounds of exact (exhaustive) maximization; a reference for the protocol's
    inherent loss.  Returns ``(solution, trace)``."""
    blocks = _blocks(f, ground, m, seed, partition)
    if max(b.size for b in blocks) > MAX_EXACT_BLOCK:
        raise PreconditionError(f"exact two-round mode needs blocks of <= {MAX_EXACT_BLOCK} elements")
    sols = [brute_force_opt(f, ground=b, k=k) for b in blocks]
    merged = tuple(e for s in sols for e in s.elements)
    ob = brute_force_opt(f, ground=merged, k=k)
    best = int(np.argmax([s.value for s in sols]))
    tr = GreediTrace(m, k, k, seed, "exact", sols, best, merged, ob)
    tr.source, win = ("merge", ob) if ob.value > sols[best].value else ("machine", sols[best])
    tr.final_kappa = tr.final = win
    return Solution(win.elements, win.value, tr.oracle_calls, "exact_two_round"), tr
