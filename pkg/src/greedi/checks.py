"""Randomized check suites shared by the test-suite and ``greedi verify``."""
from __future__ import annotations

from typing import List, NamedTuple

import numpy as np

from .constraints import Cardinality, Knapsack, PartitionMatroid
from .core import verify_monotone, verify_submodular
from .distributed import GreediConfig, exact_two_round, greedi, greedi_general
from .engines import get_engine, greedy
from .objectives import (Coverage, DPPLogDet, ExemplarObjective, GraphCut, GraphDataset,
                         InformationGain, Modular, SEKernel, SetSystemDataset, lipschitz_probe)
from .verify import BoundReport, brute_force_opt, check_bound, fingerprint, worst_case_instance

MONOTONE_KINDS = ("coverage", "modular", "exemplar", "infogain")
ALL_KINDS = MONOTONE_KINDS + ("dpp", "cut")
SUITES = ("bounds", "structure", "lipschitz", "worstcase")


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} {self.detail}".rstrip()


def random_instance(rng: np.random.Generator, kind: str, n: int):
    """Small random objective of the given family over ``n`` elements."""
    if kind == "coverage":
        universe = int(rng.integers(n, 2 * n + 1))
        member = rng.random((n, universe)) < 0.3
        member[rng.integers(n, size=universe), np.arange(universe)] = True
        indptr = np.concatenate([[0], np.cumsum(member.sum(axis=1))])
        return Coverage(SetSystemDataset(indptr, np.nonzero(member)[1], universe))
    if kind == "modular":
        return Modular(rng.uniform(0, 10, n))
    if kind == "exemplar":
        return ExemplarObjective(rng.normal(size=(n, 2)), alpha_exp=float(rng.choice([1.0, 2.0])))
    if kind == "infogain":
        return InformationGain(rng.normal(size=(n, 2)),
                               SEKernel(float(rng.uniform(0.5, 2)), float(rng.uniform(0.5, 2))))
    if kind == "dpp":
        B = rng.normal(size=(n, n + 2))
        return DPPLogDet(B @ B.T / (n + 2) + 0.5 * np.eye(n))
    if kind == "cut":
        mask = (rng.random((n, n)) < 0.4) & ~np.eye(n, dtype=bool)
        src, dst = np.nonzero(mask)
        return GraphCut(GraphDataset(n, src, dst, rng.uniform(0, 1, src.size)))
    raise ValueError(f"unknown instance kind {kind!r}")


def greedy_reports(seed: int) -> List[BoundReport]:
    """Greedy versus exhaustive OPT, at the reference budget and at budgets 1..2k."""
    rng = np.random.default_rng([seed, 1])
    kind = MONOTONE_KINDS[seed % len(MONOTONE_KINDS)]
    n, k = int(rng.integers(5, 13)), int(rng.integers(1, 5))
    f = random_instance(rng, kind, n)
    fp = fingerprint(kind, seed, n, k)
    opt = brute_force_opt(f, k=k).value
    out = [check_bound("greedy", greedy(f, budget=k).value, opt, fp)]
    for q in range(1, min(2 * k, n) + 1):
        out.append(check_bound("greedy_budget", greedy(f, budget=q).value, opt, fp, q=q, k=k))
    return out


def greedi_reports(seed: int) -> List[BoundReport]:
    """One GreeDi run and one general-constraint run against exhaustive OPT."""
    rng = np.random.default_rng([seed, 2])
    kind = MONOTONE_KINDS[seed % len(MONOTONE_KINDS)]
    n, k, m = int(rng.integers(5, 13)), int(rng.integers(1, 5)), int(rng.integers(1, 5))
    kappa = k + int(rng.integers(0, 3))
    f = random_instance(rng, kind, n)
    fp = fingerprint(kind, seed, n, k, m)
    opt = brute_force_opt(f, k=k).value
    sol, tr = greedi(f, config=GreediConfig(m, k, kappa=kappa, engine="greedy", seed=seed))
    out = [check_bound("greedi", tr.final_kappa.value, opt, fp, kappa=kappa, k=k, m=m)]
    if kappa == k:
        out.append(check_bound("greedi", sol.value, opt, fp, kappa=k, k=k, m=m))

    which = seed % 3
    if which == 0:
        c, eng = Cardinality(k), get_engine("greedy")
    elif which == 1:
        nb = int(rng.integers(2, 4))
        c, eng = PartitionMatroid(rng.integers(nb, size=n), rng.integers(1, 3, size=nb)), \
            get_engine("constrained")
    else:
        costs = rng.uniform(1, 3, n)
        c, eng = Knapsack(costs, float(rng.uniform(3, 7))), get_engine("costbenefit")
    opt_c = brute_force_opt(f, c).value
    gen, _ = greedi_general(f, None, c, eng, m, seed)
    out.append(check_bound("greedi_general", gen.value, opt_c, fp + f"/{c.kind}",
                           tau=eng.tau(c), m=m, rho=max(c.rho, 1)))
    return out


def bounds_suite(seeds: int = 200) -> List[BoundReport]:
    reports = []
    for s in range(seeds):
        reports += greedy_reports(s)
        reports += greedi_reports(s)
    return reports


def structure_suite(seeds: int = 50) -> List[CheckResult]:
    out = []
    for kind in ALL_KINDS:
        sub = mono = 0
        witness = None
        for s in range(seeds):
            rng = np.random.default_rng([s, 3])
            f = random_instance(rng, kind, int(rng.integers(3, 9)))
            r = verify_submodular(f)
            sub += r.holds
            witness = witness or r.witness
            if f.monotone:
                mono += verify_monotone(f).holds
        out.append(CheckResult(f"submodular[{kind}]", sub == seeds,
                               f"{sub}/{seeds}" + (f" witness={witness}" if witness else "")))
        if kind in MONOTONE_KINDS:
            out.append(CheckResult(f"monotone[{kind}]", mono == seeds, f"{mono}/{seeds}"))
    cut = GraphCut(GraphDataset(2, [0, 1], [1, 0], [1.0, 1.0]))
    r = verify_monotone(cut)
    out.append(CheckResult("non_monotone[cut]", not r.holds, f"witness={r.witness}"))
    return out


def lipschitz_suite(trials: int = 1000, seed: int = 0) -> List[CheckResult]:
    out = []
    rng = np.random.default_rng([seed, 4])
    X = rng.normal(size=(60, 3))
    for alpha in (1.0, 2.0):
        f = ExemplarObjective(X, alpha_exp=alpha)
        lam = f.lipschitz_constant()
        for k in (1, 3, 5):
            seen = lipschitz_probe(f, f.distance, k, trials, rng)
            out.append(CheckResult(f"lipschitz[exemplar alpha={alpha:g} k={k}]", seen <= lam,
                                   f"observed={seen:.6g} lambda={lam:.6g}"))
    g = InformationGain(X, SEKernel(0.75, 1.0))
    for k in (1, 3, 5):
        lam = g.lipschitz_constant(k)
        seen = lipschitz_probe(g, g.distance, k, trials, rng)
        out.append(CheckResult(f"lipschitz[infogain k={k}]", seen <= lam,
                               f"observed={seen:.6g} lambda={lam:.6g}"))
    return out


def worstcase_suite(sizes=(2, 3, 4)) -> List[CheckResult]:
    out = []
    for m in sizes:
        for k in sizes:
            inst = worst_case_instance(m, k)
            dist, _ = exact_two_round(inst.objective, None, m, k, partition=inst.partition)
            opt = brute_force_opt(inst.objective, k=k).value
            ratio = opt / dist.value
            out.append(CheckResult(f"worstcase[m={m} k={k}]", ratio == min(m, k),
                                   f"opt={opt:g} distributed={dist.value:g} ratio={ratio:g}"))
    return out


def run_suite(name: str, seeds: int = None) -> list:
    if name == "bounds":
        return bounds_suite(seeds or 200)
    if name == "structure":
        return structure_suite(seeds or 50)
    if name == "lipschitz":
        return lipschitz_suite(seeds or 1000)
    if name == "worstcase":
        return worstcase_suite()
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
