import itertools
import math

import numpy as np
import pytest

from greedi.checks import (bounds_suite, lipschitz_suite, random_instance, run_suite,
                           structure_suite, worstcase_suite)
from greedi.constraints import Knapsack, PartitionMatroid
from greedi.core import PreconditionError, SizeLimitError, verify_monotone, verify_submodular
from greedi.engines import ENGINES, get_engine
from greedi.objectives import Coverage, Modular, SetSystemDataset
from greedi.verify import (BOUND_NAMES, bound_factor, brute_force_opt, check_bound, fingerprint,
                           worst_case_instance)


def test_brute_force_examples():
    f = Coverage(SetSystemDataset.from_sets([[1, 2], [2, 3], [4]]))
    s = brute_force_opt(f, k=2)
    assert s.value == 3 and s.elements == (0, 1)
    w = Modular([4.0, 9.0, 1.0, 7.0])
    assert brute_force_opt(w, k=2).elements == (1, 3)
    assert brute_force_opt(w, k=4).elements == (0, 1, 2, 3)
    assert brute_force_opt(w, k=0).elements == ()


def test_brute_force_ties_are_lexicographic():
    f = Modular([1.0, 1.0, 1.0])
    assert brute_force_opt(f, k=2).elements == (0, 1)
    assert brute_force_opt(f, k=2, ground=[2, 1]).elements == (1, 2)


def test_brute_force_matches_naive_enumeration():
    rng = np.random.default_rng(0)
    for s in range(10):
        f = random_instance(rng, "exemplar", 8)
        c = PartitionMatroid(rng.integers(2, size=8), [2, 1])
        best = max(f.evaluate(S) for r in range(4) for S in itertools.combinations(range(8), r)
                   if c.is_feasible(S))
        assert brute_force_opt(f, c).value == pytest.approx(best, abs=1e-12)


def test_brute_force_size_limit():
    with pytest.raises(SizeLimitError):
        brute_force_opt(Modular(np.ones(15)))
    assert len(brute_force_opt(Modular(np.arange(20.0)), k=2).elements) == 2
    with pytest.raises(SizeLimitError):
        brute_force_opt(Modular(np.ones(21)), k=2)


@pytest.mark.parametrize("name", sorted(ENGINES))
def test_brute_force_dominates_engines(name):
    rng = np.random.default_rng(1)
    for s in range(5):
        f = random_instance(rng, "coverage", 10)
        knap = Knapsack(rng.uniform(1, 2, 10), 4.0)
        opt = brute_force_opt(f, knap).value
        assert get_engine(name).solve(f, knap, None, None, s).value <= opt + 1e-9


def test_worst_case_construction():
    inst = worst_case_instance(2, 2)
    f = inst.objective
    assert f.evaluate([inst.x(0, 0)]) == 1
    assert f.evaluate([inst.y(1)]) == 2
    assert max(inst.x(i, j) for i in range(2) for j in range(2)) < min(inst.y(0), inst.y(1))
    assert brute_force_opt(f, k=2).value == 4
    for m, k in ((4, 3), (3, 3), (2, 4)):
        w = worst_case_instance(m, k)
        assert w.objective.evaluate([w.y(i) for i in range(m)]) == m * k
        assert brute_force_opt(w.objective, k=k).value == w.opt_value
        if m >= k:
            assert w.opt_value == k * k
    small = worst_case_instance(2, 3).objective
    assert verify_submodular(small).holds and verify_monotone(small).holds
    with pytest.raises(PreconditionError):
        worst_case_instance(1, 2)


def test_worst_case_ratio_is_exactly_min_m_k():
    res = worstcase_suite()
    assert len(res) == 9 and all(r.passed for r in res)


def test_bound_factor_examples():
    assert check_bound("greedy", 0, 3.0).bound_value == pytest.approx(1.8964, abs=1e-4)
    for m, k in ((2, 5), (4, 3)):
        assert bound_factor("greedi", k=k, kappa=k, m=m) == pytest.approx((1 - 1 / math.e) / min(m, k))
    assert check_bound("greedi", 0, 100.0, k=50, kappa=50, m=4).bound_value == \
        pytest.approx(15.80, abs=0.005)
    assert bound_factor("greedy_budget", q=2, k=4) == pytest.approx(1 - math.exp(-0.5))
    assert bound_factor("two_round_exact", m=3, k=2) == 0.5
    assert bound_factor("greedi_general", tau=0.5, m=3, rho=10) == pytest.approx(1 / 6)
    with pytest.raises(PreconditionError):
        bound_factor("greedi", k=2)
    with pytest.raises(PreconditionError):
        bound_factor("nope")
    assert set(BOUND_NAMES) == {"greedy", "greedy_budget", "two_round_exact", "greedi",
                                "greedi_general"}


def test_check_bound_tolerance_and_line():
    r = check_bound("greedy", (1 - 1 / math.e) * 3 - 5e-10, 3.0, "abc")
    assert r.satisfied
    r = check_bound("greedy", (1 - 1 / math.e) * 3 - 1e-6, 3.0, "abc")
    assert not r.satisfied and r.line().startswith("FAIL greedy") and "instance=abc" in r.line()


def test_fingerprint_is_stable():
    assert fingerprint("a", 1, np.arange(3)) == fingerprint("a", 1, np.arange(3))
    assert fingerprint("a", 1) != fingerprint("a", 2)


def test_bounds_suite_small():
    reports = bounds_suite(20)
    assert reports and all(r.satisfied for r in reports)


def test_structure_suite_small():
    res = structure_suite(5)
    assert all(r.passed for r in res)
    assert any(r.name == "non_monotone[cut]" for r in res)


def test_lipschitz_suite_small():
    assert all(r.passed for r in lipschitz_suite(100))


def test_run_suite_rejects_unknown():
    with pytest.raises(ValueError):
        run_suite("nope")
