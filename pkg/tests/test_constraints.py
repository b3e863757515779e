import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedi.constraints import (Cardinality, Intersection, Knapsack, MatroidConstraint,
                                PartitionMatroid, PSystem, cardinality_constraint,
                                intersection_constraint, knapsack_constraint, matroid_constraint,
                                parse_constraint, partition_matroid)
from greedi.core import PreconditionError


def all_subsets(n):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def max_feasible_size(c, n):
    return max(len(S) for S in all_subsets(n) if c.is_feasible(S))


def test_cardinality_examples():
    c = cardinality_constraint(2)
    assert c.is_feasible([0, 1]) and not c.is_feasible([0, 1, 2])
    assert cardinality_constraint(50).rho == 50
    with pytest.raises(PreconditionError):
        cardinality_constraint(0)


def test_uniform_matroid_equals_cardinality():
    m = matroid_constraint(6, lambda S: len(S) <= 3)
    c = Cardinality(3)
    assert m.rho == 3
    for S in all_subsets(6):
        assert m.is_feasible(S) == c.is_feasible(S)


def test_partition_matroid_examples():
    pm = partition_matroid([0, 0, 1, 1], [1, 1])
    assert pm.is_feasible([0, 2])
    assert not pm.is_feasible([0, 1])
    pm2 = PartitionMatroid([0, 0, 0, 1, 2, 2], [2, 5, 1])
    assert pm2.rho == 2 + 1 + 1
    assert pm2.rho == max_feasible_size(pm2, 6)


def test_matroid_spot_check_rejects_non_matroids():
    with pytest.raises(PreconditionError, match="heredity"):
        MatroidConstraint(3, lambda S: len(S) != 1)
    # {0,1} and {2} maximal: augmentation fails for A={2}, B={0,1}
    indep = {frozenset(), frozenset({0}), frozenset({1}), frozenset({2}), frozenset({0, 1})}
    with pytest.raises(PreconditionError, match="augmentation"):
        MatroidConstraint(3, lambda S: S in indep)


def test_intersection_examples():
    pm = PartitionMatroid([0, 0, 1, 1], [1, 1])
    same = intersection_constraint([pm, pm])
    for S in all_subsets(4):
        assert same.is_feasible(S) == pm.is_feasible(S)
    # bipartite matching on left {a, b} x right {x, y}: edges ax=0, ay=1, bx=2, by=3
    left = PartitionMatroid([0, 0, 1, 1], [1, 1])
    right = PartitionMatroid([0, 1, 0, 1], [1, 1])
    match = intersection_constraint([left, right])
    feasible = {S for S in all_subsets(4) if match.is_feasible(S)}
    assert feasible == {(), (0,), (1,), (2,), (3,), (0, 3), (1, 2)}
    assert match.rho == min(left.rho, right.rho) and match.p == 2
    with pytest.raises(PreconditionError):
        intersection_constraint([])


def test_knapsack_examples():
    assert knapsack_constraint([3, 4, 5, 6], 10).rho == 4
    unit = Knapsack(np.ones(5), 3)
    for S in all_subsets(5):
        assert unit.is_feasible(S) == Cardinality(3).is_feasible(S)
    two = Knapsack([[2, 2], [2, 2], [1, 1]], [3, 5])
    assert two.is_feasible([0]) and not two.is_feasible([0, 1])
    assert two.is_feasible([0, 2])
    with pytest.raises(PreconditionError):
        knapsack_constraint([1, 0], 3)
    with pytest.raises(PreconditionError):
        knapsack_constraint([[1, 1]], [1, 2, 3])


def test_parse_constraint():
    assert parse_constraint("cardinality:4", 10).rho == 4
    assert parse_constraint("knapsack:2.5", 10).rho == 3
    assert parse_constraint("partition:3:1", 9).rho == 3
    with pytest.raises(PreconditionError):
        parse_constraint("bogus:1", 3)


def test_psystem_uses_declared_bounds():
    ps = PSystem(4, lambda S: len(S) <= 2, p=2, rho=2)
    assert ps.rho == 2 and ps.p == 2 and ps.kind == "psystem"
    assert ps.is_feasible([1, 3]) and not ps.is_feasible([0, 1, 2])


def shipped(rng, n):
    blocks = rng.integers(3, size=n)
    return [
        Cardinality(int(rng.integers(1, n + 1))),
        PartitionMatroid(blocks, rng.integers(0, 3, size=3)),
        Intersection([PartitionMatroid(blocks, rng.integers(1, 3, size=3)),
                      PartitionMatroid(rng.integers(2, size=n), rng.integers(1, 3, size=2))]),
        Knapsack(rng.uniform(0.5, 2, n), float(rng.uniform(1, 4))),
        Knapsack(rng.uniform(0.5, 2, (n, 2)), rng.uniform(1, 4, 2)),
        MatroidConstraint(n, lambda S: len(S) <= 2),
    ]


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 9))
def test_heredity_extension_and_rho(seed, n):
    rng = np.random.default_rng(seed)
    for c in shipped(rng, n):
        feas = [S for S in all_subsets(n) if c.is_feasible(S)]
        fs = set(feas)
        for S in feas:
            for r in range(len(S)):
                for T in itertools.combinations(S, r):
                    assert T in fs
        assert max(len(S) for S in feas) <= c.rho
        for S in feas[:40]:
            mask = c.extendable(list(S), np.arange(n))
            for e in range(n):
                want = e not in S and c.is_feasible(tuple(sorted(S + (e,))))
                assert c.can_extend(S, e) == want
                assert bool(mask[e]) == want
