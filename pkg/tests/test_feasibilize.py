import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multibudget import feasibilize as fz
from multibudget.errors import InvariantViolation, ValidationError
from multibudget.graphs import GraphSpec, is_forest
from multibudget.instance import BudgetedInstance, GroundSpec, gen_random
from multibudget.oracle import brute_opt
from multibudget.sweeps import overshooting_solver

H = Fraction(1, 2)


def _forest(edges, weights, lengths, budgets, n):
    return BudgetedInstance(weights, lengths, budgets, GroundSpec("forest", graph=GraphSpec(n, tuple(edges))))


# -- config --------------------------------------------------------------------


def test_config_derivations():
    cfg = fz.FeasibilizeConfig(Fraction(1, 3), 2)
    assert cfg.h == 6 and cfg.delta == Fraction(1, 9)
    cfg0 = fz.FeasibilizeConfig(H, 0)
    assert cfg0.h == 0 and cfg0.delta == H


@pytest.mark.parametrize("eps", [Fraction(2, 3), Fraction(0), Fraction(3, 2)])
def test_config_rejects_bad_eps(eps):
    with pytest.raises(ValidationError):
        fz.FeasibilizeConfig(eps, 1)


# -- exact multi-criteria oracle ---------------------------------------------------


def test_oracle_without_slack_is_the_optimum():
    inst = gen_random("forest", 7, 2, 3)
    assert inst.weight(fz.exact_multicriteria_oracle(inst, 0)) == brute_opt(inst)[0]


def test_oracle_with_huge_slack_ignores_budgets():
    inst = gen_random("uniform", 7, 2, 3)
    S = fz.exact_multicriteria_oracle(inst, 10_000)
    assert inst.weight(S) == brute_opt(inst, (10**9,) * inst.k)[0]


def test_oracle_rejects_negative_delta():
    with pytest.raises(ValidationError):
        fz.exact_multicriteria_oracle(gen_random("forest", 4, 1, 0), -1)


@given(st.integers(0, 10_000), st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1)]))
def test_oracle_matches_bitmask_scan(seed, delta):
    inst = gen_random("graphic", 6, 2, seed)
    cap = tuple((1 + delta) * b for b in inst.budgets)
    from multibudget import matroid as mt

    rk = mt.RankOracle(inst.ground.matroid)
    best = max(
        (inst.weight(S) for r in range(inst.m + 1) for S in itertools.combinations(range(inst.m), r)
         if rk.independent(S) and inst.within(S, cap)),
    )
    got = fz.exact_multicriteria_oracle(inst, delta)
    assert inst.within(got, cap) and inst.weight(got) == best


# -- greedy discard ----------------------------------------------------------------


def test_discard_nothing_when_within_target():
    inst = _forest([(0, 1), (1, 2)], (3, 4), ((1,), (1,)), (5,), 3)
    assert fz.greedy_discard({0, 1}, inst, (2,)) == (frozenset({0, 1}), (frozenset(),))


def test_discard_removes_smallest_ratio_first():
    inst = _forest([(0, 1), (1, 2), (2, 3)], (3, 4, 10), ((1,), (2,), (1,)), (5,), 4)
    # ratios 3, 2, 10: dropping element 1 suffices
    kept, removed = fz.greedy_discard({0, 1, 2}, inst, (2,))
    assert kept == frozenset({0, 2}) and removed == (frozenset({1}),)


def test_discard_ties_by_id_and_keeps_zero_length():
    inst = _forest([(0, 1), (1, 2), (2, 3)], (1, 1, 1), ((1,), (1,), (0,)), (5,), 4)
    kept, removed = fz.greedy_discard({0, 1, 2}, inst, (1,))
    assert kept == frozenset({1, 2}) and removed == (frozenset({0}),)


def test_discard_runs_budget_by_budget():
    inst = _forest([(0, 1), (1, 2)], (1, 5), ((1, 0), (0, 1)), (5, 5), 3)
    kept, removed = fz.greedy_discard({0, 1}, inst, (0, 0))
    assert kept == frozenset() and removed == (frozenset({0}), frozenset({1}))


def test_discard_rejects_wrong_target_count():
    inst = _forest([(0, 1)], (1,), ((1,),), (5,), 2)
    with pytest.raises(ValidationError):
        fz.greedy_discard({0}, inst, (1, 1))


@given(st.integers(0, 10_000), st.integers(2, 6))
def test_discard_inequality(seed, q):
    rng = random.Random(seed)
    inst = gen_random(("forest", "uniform", "matching")[seed % 3], rng.randint(3, 9), rng.randint(1, 3), seed)
    from multibudget.oracle import enumerate_solutions

    sols = list(enumerate_solutions(inst, inst.budgets))
    S = rng.choice(sols)
    delta = Fraction(1, q)
    targets = tuple((1 - delta) * b for b in inst.budgets)
    kept, removed = fz.greedy_discard(S, inst, targets, delta)
    w_max = max((inst.weights[e] for e in S), default=0)
    assert inst.within(kept, targets)
    assert kept | frozenset().union(*removed) == frozenset(S)
    for E in removed:
        assert inst.weight(E) <= delta * inst.weight(S) + w_max


# -- guesses and reductions -----------------------------------------------------------


def test_forest_reduction_contracts_guess():
    inst = _forest([(0, 1), (1, 2), (0, 2), (2, 3)], (5, 4, 3, 2), ((1,),) * 4, (10,), 4)
    red, ids = fz.reduce_for_guess(inst, {0})
    # edge 2 becomes parallel to edge 1, edge 0 is gone
    assert ids == (1, 2, 3) and red.budgets == (9,) and red.ground.graph.n == 3
    red2, ids2 = fz.reduce_for_guess(inst, {0, 1})
    assert ids2 == (3,)


def test_matching_reduction_deletes_endpoints():
    g = GraphSpec(4, ((0, 1), (1, 2), (2, 3)))
    inst = BudgetedInstance((3, 2, 1), ((1,),) * 3, (5,), GroundSpec("matching", graph=g))
    red, ids = fz.reduce_for_guess(inst, {0})
    assert ids == (2,) and red.ground.graph.n == 2


def test_reduction_drops_elements_over_residual():
    inst = _forest([(0, 1), (1, 2), (2, 3)], (5, 4, 3), ((2,), (2,), (1,)), (3,), 4)
    _, ids = fz.reduce_for_guess(inst, {0})
    assert ids == (2,)


def test_zero_budgets_guess_only_empty_set():
    inst = gen_random("forest", 5, 0, 1)
    assert fz.enumerate_guesses(inst, 0) == [frozenset()]
    S = fz.feasibilize(inst, 1)
    assert inst.weight(S) == brute_opt(inst)[0]


# -- the wrapper -------------------------------------------------------------------


def test_contract_breach_is_detected():
    inst = _forest([(0, 1), (1, 2)], (1, 1), ((1,), (1,)), (1,), 3)
    take_all = lambda red, delta: frozenset(range(red.m))
    with pytest.raises(InvariantViolation):
        fz.feasibilize(inst, 1, take_all)


def test_unsupported_ground_rejected():
    inst = gen_random("forest", 4, 1, 0)
    path = BudgetedInstance(inst.weights, inst.lengths, inst.budgets,
                            GroundSpec("path", graph=inst.ground.graph, s=0, t=1))
    with pytest.raises(ValidationError):
        fz.feasibilize(path, 1)


@given(st.integers(0, 10_000), st.sampled_from(["forest", "uniform", "partition", "graphic", "linear"]),
       st.sampled_from([Fraction(1, 2), Fraction(1, 3)]))
def test_wrapper_approximation_and_feasibility(seed, kind, eps):
    rng = random.Random(seed)
    inst = gen_random(kind, rng.randint(3, 8), rng.randint(1, 3), seed)
    S = fz.feasibilize(inst, eps)
    opt, _ = brute_opt(inst)
    assert inst.within(S) and inst.weight(S) >= (1 - eps) * opt
    T = fz.feasibilize(inst, eps, overshooting_solver)
    assert inst.within(T)
    if inst.ground.kind == "forest":
        assert is_forest(inst.ground.graph, S) and is_forest(inst.ground.graph, T)


def test_overshooting_solver_uses_its_slack():
    inst = _forest([(0, 1), (1, 2)], (1, 1), ((1,), (1,)), (1,), 3)
    S = overshooting_solver(inst, 1)
    assert inst.usage(S) == (2,)


def test_parallel_matches_serial():
    inst = gen_random("graphic", 7, 2, 11)
    assert fz.feasibilize(inst, H, jobs=2) == fz.feasibilize(inst, H)


def test_trace_records_every_guess():
    inst = gen_random("uniform", 5, 1, 2)
    recs = []
    fz.feasibilize(inst, 1, trace=recs.append)
    assert len(recs) == len(fz.enumerate_guesses(inst, 1))
    assert all(set(r) == {"guess", "candidate", "weight", "slack"} for r in recs)
