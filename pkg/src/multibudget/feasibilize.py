"""Turn a budget-violating (multi-criteria) solver into a strictly feasible one.

Guess the h = k/eps heaviest elements of an optimum, shrink the residual
budgets by (1 - delta) with delta = eps/(k + 1), and let the solver overshoot
by (1 + delta): since (1 + delta)(1 - delta) <= 1 the result fits the
residual budgets exactly.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from multibudget import matroid as mt
from multibudget.errors import InvariantViolation, ValidationError, check
from multibudget.graphs import GraphSpec, UnionFind, is_forest, is_matching
from multibudget.instance import BudgetedInstance, GroundSpec
from multibudget.matroid_ptas import best_candidate
from multibudget.numeric import ZERO, as_rat, format_rat
from multibudget.oracle import brute_opt, enumerate_solutions

# (instance, delta) -> element set with every length at most (1 + delta) * budget
MultiCriteriaSolver = Callable[[BudgetedInstance, Fraction], frozenset]

SUPPORTED = ("matroid", "matching", "forest")


@dataclass(frozen=True)
class FeasibilizeConfig:
    eps: Fraction
    k: int
    h: int = field(init=False)
    delta: Fraction = field(init=False)

    def __post_init__(self):
        eps = as_rat(self.eps)
        if not (0 < eps <= 1) or (1 / eps).denominator != 1:
            raise ValidationError(f"eps must be 1/N for a positive integer N, got {format_rat(eps)}")
        if self.k < 0:
            raise ValidationError("negative number of budgets")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "h", int(self.k / eps))
        object.__setattr__(self, "delta", eps / (self.k + 1))
        check((1 + self.delta) * (1 - self.delta) <= 1, "scaling identity fails")


def exact_multicriteria_oracle(inst: BudgetedInstance, delta) -> frozenset:
    """Exact maximum-weight solution with every length at most (1 + delta) * budget."""
    delta = as_rat(delta)
    if delta < 0:
        raise ValidationError("delta must be nonnegative")
    _, S = brute_opt(inst, tuple((1 + delta) * b for b in inst.budgets))
    return frozenset() if S is None else S


def greedy_discard(S, inst: BudgetedInstance, target_budgets, delta=None):
    """Drop smallest w/l_i elements until l_i fits its target, for i = 0..k-1 in turn.

    Zero-length elements are never dropped; ties go to the smallest id. With
    ``delta`` given, ``w(E_i) <= delta * w(S) + w_max`` is asserted for each i,
    where w_max ranges over S. Returns ``(kept, (E_0, ..., E_{k-1}))``.
    """
    targets = tuple(as_rat(b) for b in target_budgets)
    if len(targets) != inst.k:
        raise ValidationError(f"expected {inst.k} targets, got {len(targets)}")
    kept = set(S)
    w_S = inst.weight(kept)
    w_max = max((inst.weights[e] for e in kept), default=ZERO)
    removed = []
    for i in range(inst.k):
        col = inst.length_column(i)
        order = sorted((e for e in kept if col[e] > 0), key=lambda e: (inst.weights[e] / col[e], e))
        used = sum((col[e] for e in kept), ZERO)
        E_i = []
        for e in order:
            if used <= targets[i]:
                break
            kept.discard(e)
            E_i.append(e)
            used -= col[e]
        check(used <= targets[i], f"target {i} still exceeded after discarding")
        if delta is not None:
            check(inst.weight(E_i) <= as_rat(delta) * w_S + w_max, f"discarded set {i} outweighs delta*w(S) + w_max")
        removed.append(frozenset(E_i))
    return frozenset(kept), tuple(removed)


def _forest_reduce(graph: GraphSpec, guess, keep):
    uf = UnionFind(graph.n)
    for e in guess:
        uf.union(*graph.edges[e])
    roots = sorted({uf.find(v) for v in range(graph.n)})
    pos = {r: i for i, r in enumerate(roots)}
    kept, edges = [], []
    for e in keep:
        u, v = (pos[uf.find(x)] for x in graph.edges[e])
        if u != v:
            kept.append(e)
            edges.append((u, v))
    return GroundSpec("forest", graph=GraphSpec(len(roots), tuple(edges))), tuple(kept)


def _matching_reduce(graph: GraphSpec, guess, keep):
    covered = {v for e in guess for v in graph.edges[e]}
    kept = [e for e in keep if not set(graph.edges[e]) & covered]
    nodes = sorted({v for e in kept for v in graph.edges[e]})
    pos = {v: i for i, v in enumerate(nodes)}
    edges = tuple((pos[graph.edges[e][0]], pos[graph.edges[e][1]]) for e in kept)
    return GroundSpec("matching", graph=GraphSpec(len(nodes), edges)), tuple(kept)


def _matroid_reduce(spec, guess, keep):
    rem = [e for e in range(spec.m) if e not in guess]
    pos = {e: i for i, e in enumerate(rem)}
    return GroundSpec("matroid", matroid=mt.restrict(mt.contract(spec, guess), [pos[e] for e in keep])), tuple(keep)


def reduce_for_guess(inst: BudgetedInstance, guess):
    """Residual instance whose solutions are exactly the feasible extensions of ``guess``
    by elements no heavier than its lightest one.

    Returns ``(reduced, ids)`` where reduced id j is original id ``ids[j]``.
    """
    guess = frozenset(guess)
    residual = tuple(b - u for b, u in zip(inst.budgets, inst.usage(guess)))
    threshold = min((inst.weights[e] for e in guess), default=None)
    keep = [
        e
        for e in range(inst.m)
        if e not in guess
        and (threshold is None or inst.weights[e] <= threshold)
        and all(inst.lengths[e][i] <= residual[i] for i in range(inst.k))
    ]
    g = inst.ground
    if g.kind == "matroid":
        ground, ids = _matroid_reduce(g.matroid, guess, keep)
    elif g.kind == "matching":
        ground, ids = _matching_reduce(g.graph, guess, keep)
    else:
        ground, ids = _forest_reduce(g.graph, guess, keep)
    reduced = BudgetedInstance(
        tuple(inst.weights[e] for e in ids),
        tuple(inst.lengths[e] for e in ids),
        residual,
        ground,
    )
    return reduced, ids


def _in_family(inst: BudgetedInstance, S) -> bool:
    g = inst.ground
    if g.kind == "matroid":
        return mt.RankOracle(g.matroid, memo=False).independent(S)
    return is_matching(g.graph, S) if g.kind == "matching" else is_forest(g.graph, S)


def enumerate_guesses(inst: BudgetedInstance, h: int):
    found = [S for S in enumerate_solutions(inst, inst.budgets) if len(S) <= h]
    found.sort(key=lambda S: (len(S), sorted(S)))
    return found


def run_guess(inst: BudgetedInstance, guess, cfg: FeasibilizeConfig, solver: MultiCriteriaSolver):
    reduced, ids = reduce_for_guess(inst, guess)
    scaled = reduced.with_budgets(tuple((1 - cfg.delta) * b for b in reduced.budgets))
    local = frozenset(solver(scaled, cfg.delta))
    if any(not (0 <= e < reduced.m) for e in local) or not _in_family(reduced, local):
        raise InvariantViolation("solver returned a set outside the reduced family")
    allowed = tuple((1 + cfg.delta) * b for b in scaled.budgets)
    if not scaled.within(local, allowed):
        raise InvariantViolation("solver broke its (1 + delta) violation contract")
    check(reduced.within(local), "scaled solution exceeds the residual budgets")
    candidate = frozenset(guess) | frozenset(ids[e] for e in local)
    check(_in_family(inst, candidate), "candidate left the family")
    check(inst.within(candidate), "candidate violates an original budget")
    record = {
        "guess": sorted(guess),
        "candidate": sorted(candidate),
        "weight": format_rat(inst.weight(candidate)),
        "slack": [format_rat(b - u) for b, u in zip(inst.budgets, inst.usage(candidate))],
    }
    return candidate, record


def _run_guess_star(args):
    return run_guess(*args)


def feasibilize(
    inst: BudgetedInstance,
    eps,
    solver: Optional[MultiCriteriaSolver] = None,
    trace=None,
    jobs: int = 1,
) -> frozenset:
    """Budget-feasible solution from a (1 + delta)-violating ``solver``.

    ``eps`` may be a :class:`FeasibilizeConfig`. The solver defaults to
    :func:`exact_multicriteria_oracle`.
    """
    if inst.ground.kind not in SUPPORTED:
        raise ValidationError(f"feasibilize supports {SUPPORTED}, not {inst.ground.kind!r}")
    cfg = eps if isinstance(eps, FeasibilizeConfig) else FeasibilizeConfig(as_rat(eps), inst.k)
    if cfg.k != inst.k:
        raise ValidationError("config was built for a different number of budgets")
    solver = solver or exact_multicriteria_oracle
    work = [(inst, g, cfg, solver) for g in enumerate_guesses(inst, cfg.h)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_guess_star, work, chunksize=8))
    else:
        results = [_run_guess_star(w) for w in work]
    if trace is not None:
        for _, rec in results:
            trace(rec)
    return best_candidate(inst, (c for c, _ in results))
