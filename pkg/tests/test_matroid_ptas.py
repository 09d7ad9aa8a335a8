import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multibudget import matroid as mt
from multibudget.errors import ValidationError
from multibudget.instance import BudgetedInstance, GroundSpec, gen_random
from multibudget.lp import LE, LinearProgram, Row, certify, solve_vertex
from multibudget.matroid_ptas import (
    check_face,
    enumerate_guesses,
    guess_size,
    reduce_for_guess,
    round_down,
    run_guess,
    solve_kbudget_matroid,
    solve_matroid_lp,
)
from multibudget.oracle import brute_opt

KINDS = ("uniform", "partition", "graphic", "linear")


def _uniform_example():
    return BudgetedInstance(
        (5, 4, 3, 1), ((2,), (4,), (4,), (1,)), (4,), GroundSpec("matroid", matroid=mt.Uniform(4, 2))
    )


def test_guess_size():
    assert guess_size(2, Fraction(1, 3)) == 6
    assert guess_size(1, 1) == 1
    with pytest.raises(ValidationError):
        guess_size(2, Fraction(2, 3))
    with pytest.raises(ValidationError):
        guess_size(2, 0)


def test_face_of_known_vertex():
    sol = solve_matroid_lp(_uniform_example())
    certify(sol)
    assert sol.x == (1, Fraction(1, 2), 0, 0)
    d = check_face(sol, 1)
    assert (d.d_bound, d.frac_count, d.frac_sum) == (1, 1, Fraction(1, 2))
    assert round_down(sol.x, mt.Uniform(4, 2)) == frozenset({0})


def test_integral_vertex_has_no_fractions():
    inst = _uniform_example().with_budgets((100,))
    sol = solve_matroid_lp(inst)
    d = check_face(sol, 1)
    assert (d.d_bound, d.frac_count, d.frac_sum) == (0, 0, 0)
    assert round_down(sol.x, mt.Uniform(4, 2), inst.weights) == frozenset({0, 1})


def test_face_check_needs_a_vertex():
    rows = [Row((1, 1, 1), LE, Fraction(3, 2), "budget0")]
    sol = solve_vertex(LinearProgram((1, 1, 1), rows))
    fake = type(sol)((Fraction(1, 2),) * 3, sol.objective_value, frozenset(), sol.duals, sol.bound_duals, sol.lp)
    with pytest.raises(ValidationError):
        check_face(fake, 1)


def test_fractional_round_down_bound():
    x = (Fraction(1, 2), Fraction(1, 2), Fraction(1, 3))
    assert round_down(x, mt.Uniform(3, 2), (3, 3, 3)) == frozenset()


@given(st.sampled_from(KINDS), st.integers(0, 5_000), st.integers(1, 3))
def test_vertex_fraction_bounds(kind, seed, k):
    inst = gen_random(kind, random.Random(seed).randint(2, 9), k, seed)
    sol = solve_matroid_lp(inst)
    certify(sol)
    d = check_face(sol, k)
    assert d.frac_count <= 2 * d.d_bound and d.frac_sum <= d.d_bound


def test_slack_budgets_give_greedy():
    inst = gen_random("graphic", 9, 2, 4)
    inst = inst.with_budgets((10_000, 10_000))
    out = solve_kbudget_matroid(inst, Fraction(1, 2))
    assert inst.weight(out) == inst.weight(mt.greedy(inst.ground.matroid, inst.weights))


def test_zero_budgets_give_empty_set():
    inst = BudgetedInstance((3, 4), ((1,), (2,)), (0,), GroundSpec("matroid", matroid=mt.Uniform(2, 2)))
    assert solve_kbudget_matroid(inst, 1) == frozenset()


def test_guess_reduction():
    inst = _uniform_example().with_budgets((6,))
    state = reduce_for_guess(inst, {1})
    # element 0 is heavier than the guess, element 2 overflows the residual budget 2
    assert state.ids == (3,)
    assert state.reduced.budgets == (2,)
    assert all(inst.lengths[e][0] <= 2 for e in state.ids)
    assert reduce_for_guess(inst, {0, 1, 2}).reduced is None


def test_guesses_are_feasible_and_sorted():
    inst = gen_random("partition", 7, 2, 1)
    gs = list(enumerate_guesses(inst, 2))
    assert gs[0] == frozenset()
    assert all(inst.within(g) and len(g) <= 2 for g in gs)
    assert gs == sorted(gs, key=lambda g: (len(g), sorted(g)))


def test_run_guess_record():
    inst = gen_random("uniform", 6, 1, 3)
    cand, rec = run_guess(inst, frozenset(), 1)
    assert rec["guess"] == [] and "frac_count" in rec
    assert inst.within(cand)


@given(st.sampled_from(KINDS), st.integers(0, 5_000), st.sampled_from([Fraction(1, 2), Fraction(1, 3)]))
def test_approximation_against_brute_force(kind, seed, eps):
    rng = random.Random(seed)
    inst = gen_random(kind, rng.randint(2, 8), rng.randint(1, 2), seed)
    out = solve_kbudget_matroid(inst, eps)
    opt, _ = brute_opt(inst)
    assert mt.independent(inst.ground.matroid, out)
    assert inst.within(out)
    assert inst.weight(out) >= (1 - eps) * opt


def test_parallel_matches_serial():
    inst = gen_random("linear", 8, 2, 9)
    assert solve_kbudget_matroid(inst, Fraction(1, 2), jobs=2) == solve_kbudget_matroid(inst, Fraction(1, 2))


def test_wrong_ground_rejected():
    inst = gen_random("matching", 5, 2, 0)
    with pytest.raises(ValidationError):
        solve_kbudget_matroid(inst, Fraction(1, 2))
