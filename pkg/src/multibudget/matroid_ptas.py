"""k-budgeted matroid independent set: guess, solve the LP to a vertex, round down.

At a vertex of the matroid polytope cut by k budget rows, the fractional part
is tiny: if d budget rows are tight, at most 2d coordinates are fractional and
they sum to at most d. :func:`check_face` asserts exactly this on every vertex
the solver produces.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from multibudget import matroid as mt
from multibudget.config import default_config
from multibudget.errors import InvariantViolation, ValidationError, check
from multibudget.instance import BudgetedInstance, GroundSpec
from multibudget.lp import LE, Row, SeparationProblem, certify, solve_with_separation
from multibudget.numeric import ONE, ZERO, as_rat, dot, format_rat


def guess_size(k: int, eps, factor: int = 1) -> int:
    """``factor * k / eps`` after checking that ``1/eps`` is a positive integer."""
    eps = as_rat(eps)
    if not (0 < eps <= 1) or (1 / eps).denominator != 1:
        raise ValidationError(f"eps must be 1/N for a positive integer N, got {format_rat(eps)}")
    return factor * k * int(1 / eps)


def budget_rows(inst: BudgetedInstance) -> list:
    return [Row(inst.length_column(i), LE, inst.budgets[i], f"budget{i}") for i in range(inst.k)]


def matroid_oracle(oracle: mt.RankOracle, bound: int):
    def separate(x):
        S = mt.separate(oracle, x, bound)
        if S is None:
            return None
        coeffs = tuple(ONE if e in S else ZERO for e in range(oracle.m))
        return Row(coeffs, LE, Fraction(oracle.rank(S)), "rank{" + ",".join(map(str, sorted(S))) + "}")

    return separate


def solve_matroid_lp(inst: BudgetedInstance, cfg=None, oracle=None):
    """Vertex of ``max w.x`` over P_I with the k budget rows (rows 0..k-1)."""
    cfg = cfg or default_config()
    if inst.ground.kind != "matroid":
        raise ValidationError("matroid LP needs a matroid ground")
    oracle = oracle or mt.RankOracle(inst.ground.matroid)
    sp = SeparationProblem(inst.weights, budget_rows(inst), matroid_oracle(oracle, cfg.separation_bound), cfg.max_cut_rounds)
    return solve_with_separation(sp)


@dataclass(frozen=True)
class FaceDiagnostics:
    d_bound: int
    frac_count: int
    frac_sum: Fraction


def check_face(sol, k: int) -> FaceDiagnostics:
    """Count fractional coordinates of a vertex; rows 0..k-1 must be the budgets."""
    if not sol.is_vertex():
        raise ValidationError("check_face needs a vertex solution")
    d = sum(1 for i in range(k) if i in sol.tight_rows)
    frac = [v for v in sol.x if v.denominator != 1]
    diag = FaceDiagnostics(d, len(frac), sum(frac, ZERO))
    if diag.frac_count > 2 * d or diag.frac_sum > d:
        raise InvariantViolation(f"vertex has {diag.frac_count} fractional entries summing to {diag.frac_sum} with d={d}")
    return diag


def round_down(x, oracle, weights=None, frac_sum=None) -> frozenset:
    """Keep the coordinates equal to 1.

    With ``weights`` and ``frac_sum`` the loss bound
    ``w(E_L) >= w.x - frac_sum * w_max`` is checked as well.
    """
    oracle = mt.as_oracle(oracle)
    E_L = frozenset(e for e, v in enumerate(x) if v == 1)
    check(oracle.independent(E_L), "rounded-down set is dependent")
    if weights is not None:
        frac_sum = sum((v for v in x if v.denominator != 1), ZERO) if frac_sum is None else frac_sum
        w_max = max(weights, default=ZERO)
        gained = sum((weights[e] for e in E_L), ZERO)
        check(gained >= dot(weights, x) - frac_sum * w_max, "round-down lost more than frac_sum * w_max")
    return E_L


@dataclass
class GuessState:
    guess: frozenset
    reduced: Optional[BudgetedInstance]
    ids: tuple  # reduced id i is original id ids[i]


def _minor(spec, keep, contracted):
    rem = [e for e in range(spec.m) if e not in contracted]
    pos = {e: i for i, e in enumerate(rem)}
    return mt.restrict(mt.contract(spec, contracted), [pos[e] for e in keep])


def reduce_for_guess(inst: BudgetedInstance, guess) -> GuessState:
    """Contract the guess, drop heavier and individually over-budget elements.

    Returns a state with ``reduced=None`` when the guess itself is infeasible.
    """
    guess = frozenset(guess)
    spec = inst.ground.matroid
    if not mt.RankOracle(spec, memo=False).independent(guess) or not inst.within(guess):
        return GuessState(guess, None, ())
    used = inst.usage(guess)
    residual = tuple(b - u for b, u in zip(inst.budgets, used))
    threshold = min((inst.weights[e] for e in guess), default=None)
    keep = tuple(
        e
        for e in range(inst.m)
        if e not in guess
        and (threshold is None or inst.weights[e] <= threshold)
        and all(inst.lengths[e][i] <= residual[i] for i in range(inst.k))
    )
    reduced = BudgetedInstance(
        tuple(inst.weights[e] for e in keep),
        tuple(inst.lengths[e] for e in keep),
        residual,
        GroundSpec("matroid", matroid=_minor(spec, keep, guess)),
    )
    return GuessState(guess, reduced, keep)


def run_guess(inst: BudgetedInstance, guess, eps, cfg=None):
    """One guess of the scheme. Returns ``(candidate or None, trace record)``."""
    eps = as_rat(eps)
    state = reduce_for_guess(inst, guess)
    record = {"guess": sorted(state.guess)}
    if state.reduced is None:
        record["skipped"] = "guess infeasible"
        return None, record
    red = state.reduced
    oracle = mt.RankOracle(red.ground.matroid)
    sol = solve_matroid_lp(red, cfg, oracle)
    certify(sol)
    diag = check_face(sol, red.k)
    local = round_down(sol.x, oracle, red.weights, diag.frac_sum)
    candidate = state.guess | frozenset(state.ids[e] for e in local)
    check(mt.RankOracle(inst.ground.matroid, memo=False).independent(candidate), "candidate is dependent")
    check(inst.within(candidate), "candidate violates a budget")
    h = guess_size(inst.k, eps)
    w_max = red.w_max
    if len(state.guess) == h and h > 0:
        check(inst.k * w_max <= eps * inst.weight(state.guess), "k*w_max exceeds eps*w(E_H) on a full guess")
    record.update(
        lp_value=format_rat(sol.objective_value),
        d_bound=diag.d_bound,
        frac_count=diag.frac_count,
        frac_sum=format_rat(diag.frac_sum),
        cuts=sol.rounds - 1,
        candidate=sorted(candidate),
        weight=format_rat(inst.weight(candidate)),
    )
    return candidate, record


def enumerate_guesses(inst: BudgetedInstance, h: int):
    """Independent, budget-feasible sets of size at most h, by size then lexicographically."""
    oracle = mt.RankOracle(inst.ground.matroid)
    for size in range(min(h, inst.m) + 1):
        for combo in itertools.combinations(range(inst.m), size):
            if inst.within(combo) and oracle.independent(combo):
                yield frozenset(combo)


def best_candidate(inst, candidates):
    best = frozenset()
    for c in candidates:
        if c is None:
            continue
        wc, wb = inst.weight(c), inst.weight(best)
        if wc > wb or (wc == wb and sorted(c) < sorted(best)):
            best = c
    return best


def _run_guess_star(args):
    return run_guess(*args)


def solve_kbudget_matroid(inst: BudgetedInstance, eps, cfg=None, trace=None, jobs: int = 1) -> frozenset:
    """(1 - eps)-approximate max-weight independent set under k budgets."""
    if inst.ground.kind != "matroid":
        raise ValidationError("matroid-ptas needs a matroid ground")
    if inst.k < 1:
        raise ValidationError("matroid-ptas needs at least one budget")
    eps = as_rat(eps)
    h = guess_size(inst.k, eps)
    guesses = list(enumerate_guesses(inst, h))
    work = [(inst, g, eps, cfg) for g in guesses]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_guess_star, work, chunksize=8))
    else:
        results = [_run_guess_star(w) for w in work]
    if trace is not None:
        for _, rec in results:
            trace(rec)
    return best_candidate(inst, (c for c, _ in results))
