import math

import numpy as np
import pytest

from greedi.checks import random_instance
from greedi.constraints import Cardinality, Intersection, Knapsack, PartitionMatroid
from greedi.core import PreconditionError, SetFunction
from greedi.engines import (ENGINES, constrained_greedy, cost_benefit_greedy, get_engine, greedy,
                            lazy_greedy, random_greedy)
from greedi.objectives import Coverage, GraphCut, GraphDataset, Modular, SetSystemDataset
from greedi.verify import brute_force_opt


def cov(*sets):
    return Coverage(SetSystemDataset.from_sets(sets))


def test_greedy_examples():
    f = cov([1, 2], [2, 3], [4], [3])
    s = greedy(f, budget=2)
    assert s.elements == (0, 1) and s.value == 3
    assert brute_force_opt(f, k=2).value == 3
    empty = greedy(f, budget=0)
    assert empty.elements == () and empty.value == 0
    m = greedy(Modular([5, 1, 3]), budget=2)
    assert set(m.elements) == {0, 2} and m.value == 8


def test_greedy_budget_rules():
    f = Modular([1.0, 2.0, 3.0])
    assert greedy(f, Cardinality(2)).elements == (2, 1)
    with pytest.raises(PreconditionError):
        greedy(f, Cardinality(2), budget=3)
    with pytest.raises(PreconditionError):
        greedy(f)
    assert greedy(f, budget=2, ground=[]).elements == ()
    assert greedy(f, budget=5, ground=[0, 1]).elements == (1, 0)


def test_non_monotone_greedy_stops_at_negative_gains():
    f = Modular([2.0, -1.0, 1.0])
    assert greedy(f, budget=3).elements == (0, 2)
    assert lazy_greedy(f, budget=3).elements == (0, 2)


def test_lazy_examples_and_call_counts():
    f = cov([1, 2], [2, 3], [4], [3])
    assert lazy_greedy(f, budget=2).elements == greedy(f, budget=2).elements
    n, k = 100, 10
    disjoint = cov(*[[i] for i in range(n)])
    s = lazy_greedy(disjoint, budget=k)
    # f(empty), one sweep, then one refresh before every later pick
    assert s.oracle_calls == 1 + n + (k - 1)
    w = np.random.default_rng(0).uniform(1, 2, 30)
    s = lazy_greedy(Modular(w), budget=5)
    assert s.oracle_calls == 1 + 30 + 4
    assert list(s.elements) == list(np.argsort(-w)[:5])


@pytest.mark.parametrize("seed", range(100))
def test_lazy_matches_greedy(seed):
    rng = np.random.default_rng(seed)
    kind = ("coverage", "modular", "exemplar", "infogain")[seed % 4]
    n = int(rng.integers(10, 60))
    f = random_instance(rng, kind, n)
    k = int(rng.integers(1, min(n, 12)))
    a, b = greedy(f, budget=k), lazy_greedy(f, budget=k)
    assert a.elements == b.elements
    assert a.value == b.value
    assert b.oracle_calls <= a.oracle_calls


def test_lazy_respects_constraints():
    rng = np.random.default_rng(3)
    f = random_instance(rng, "exemplar", 30)
    pm = PartitionMatroid(rng.integers(3, size=30), [2, 1, 2])
    a, b = constrained_greedy(f, pm), lazy_greedy(f, pm)
    assert a.elements == b.elements and pm.is_feasible(b.elements)


def test_cost_benefit_prefers_cheap_items_when_they_dominate():
    f = Modular([10.0, 6.0, 6.0, 6.0])
    knap = Knapsack([10.0, 1.0, 1.0, 1.0], 10.0)
    s = cost_benefit_greedy(f, knap)
    opt = brute_force_opt(f, knap)
    assert s.value == opt.value == 18.0
    assert set(s.elements) == {1, 2, 3}


def test_cost_benefit_unit_costs_match_greedy():
    rng = np.random.default_rng(4)
    f = random_instance(rng, "coverage", 12)
    s = cost_benefit_greedy(f, Knapsack(np.ones(12), 4))
    assert s.value == greedy(f, budget=4).value


def test_cost_benefit_edge_cases():
    f = Modular([3.0, 5.0])
    assert cost_benefit_greedy(f, Knapsack([4.0, 9.0], 5.0)).elements == (0,)
    assert cost_benefit_greedy(f, Knapsack([6.0, 9.0], 5.0)).elements == ()
    with pytest.raises(PreconditionError):
        cost_benefit_greedy(f, PartitionMatroid([0, 0], [1]))


@pytest.mark.parametrize("seed", range(20))
def test_cost_benefit_bound_vs_brute_force(seed):
    rng = np.random.default_rng(seed)
    f = random_instance(rng, ("coverage", "exemplar", "infogain")[seed % 3], 10)
    knap = Knapsack(rng.uniform(1, 3, 10), float(rng.uniform(3, 8)))
    s = cost_benefit_greedy(f, knap)
    assert knap.is_feasible(s.elements)
    assert s.value >= (1 - 1 / math.sqrt(math.e)) * brute_force_opt(f, knap).value - 1e-9


def test_random_greedy_examples():
    f = Modular([1.0, 7.0, 3.0])
    for seed in range(5):
        assert random_greedy(f, 1, rng=seed).elements == (1,)
    zero = SetFunction(4, lambda S: 0.0, nonnegative=True)
    assert random_greedy(zero, 3, rng=0).value == 0.0


def test_random_greedy_cut_mean_meets_one_over_e():
    g = GraphCut(GraphDataset(2, [0, 1], [1, 0], [1.0, 1.0]))
    opt = brute_force_opt(g, k=2).value
    assert opt == 1.0
    rng = np.random.default_rng(0)
    vals = [random_greedy(g, 2, rng=rng).value for _ in range(10_000)]
    assert np.mean(vals) >= opt / math.e


def test_random_greedy_monotone_mean_meets_greedy_factor():
    rng = np.random.default_rng(7)
    f = random_instance(rng, "coverage", 8)
    opt = brute_force_opt(f, k=3).value
    vals = [random_greedy(f, 3, rng=rng).value for _ in range(10_000)]
    assert np.mean(vals) >= (1 - 1 / math.e) * opt


def test_random_greedy_feasible_under_constraint():
    rng = np.random.default_rng(8)
    f = random_instance(rng, "cut", 12)
    pm = PartitionMatroid(rng.integers(3, size=12), [1, 1, 1])
    for s in range(50):
        sol = random_greedy(f, 3, rng=s, constraint=pm)
        assert pm.is_feasible(sol.elements) and len(sol) <= 3


def test_constrained_examples():
    f = Modular([5.0, 4.0, 3.0])
    s = constrained_greedy(f, PartitionMatroid([0, 0, 1], [1, 1]))
    assert s.elements == (0, 2) and s.value == 8
    rng = np.random.default_rng(9)
    g = random_instance(rng, "coverage", 10)
    assert constrained_greedy(g, Cardinality(3)).elements == greedy(g, budget=3).elements
    # 2x2 bipartite matching: edges ax, ay, bx, by
    w = Modular([3.0, 2.0, 2.0, 0.5])
    match = Intersection([PartitionMatroid([0, 0, 1, 1], [1, 1]),
                          PartitionMatroid([0, 1, 0, 1], [1, 1])])
    s = constrained_greedy(w, match)
    assert match.is_feasible(s.elements)
    assert s.value >= 0.5 * brute_force_opt(w, match).value


def test_engine_registry_and_tau():
    assert set(ENGINES) == {"greedy", "lazy", "costbenefit", "randomgreedy", "constrained"}
    assert get_engine("greedy").tau() == pytest.approx(1 - 1 / math.e)
    assert get_engine("constrained").tau(PartitionMatroid([0, 1], [1, 1])) == 0.5
    inter = Intersection([PartitionMatroid([0, 1], [1, 1])] * 3)
    assert get_engine("greedy").tau(inter) == pytest.approx(1 / 4)
    assert get_engine("costbenefit").tau(Knapsack([1.0], 1.0)) == pytest.approx(1 - math.exp(-0.5))
    assert get_engine("randomgreedy").tau() == pytest.approx(1 / math.e)
    with pytest.raises(PreconditionError):
        get_engine("greedy").tau(Knapsack([1.0], 1.0))
    with pytest.raises(PreconditionError):
        get_engine("nope")


@pytest.mark.parametrize("name", sorted(ENGINES))
def test_every_engine_output_is_feasible(name):
    rng = np.random.default_rng(10)
    f = random_instance(rng, "exemplar", 15)
    for c in (Cardinality(4), Knapsack(rng.uniform(1, 2, 15), 4.0)):
        s = get_engine(name).solve(f, c, None, None, 0)
        assert c.is_feasible(s.elements)
