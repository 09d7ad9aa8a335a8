"""Brute-force ground truth: exact optima, Pareto sets, PARTITION.

Solutions are enumerated by canonical backtracking over element ids in
increasing order. Since lengths are nonnegative, a partial set that already
exceeds a budget is pruned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from multibudget import matroid as mt
from multibudget.config import default_config
from multibudget.errors import ResourceBoundError, ValidationError
from multibudget.graphs import UnionFind
from multibudget.numeric import ZERO, as_rat


class _Budget:
    """Visit counter shared by one enumeration."""

    def __init__(self, bound):
        self.left = bound

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise ResourceBoundError("brute-force enumeration bound exceeded (raise MB_BRUTE_BOUND)")


def enumerate_solutions(inst, budgets=None, bound: Optional[int] = None) -> Iterator[frozenset]:
    """Yield every S in F (as a frozenset), optionally only those within ``budgets``."""
    counter = _Budget(default_config().brute_bound if bound is None else bound)
    k, lengths = inst.k, inst.lengths
    limit = None if budgets is None else tuple(as_rat(b) for b in budgets)
    g = inst.ground

    def fits(usage, e):
        if limit is None:
            return True, usage
        row = lengths[e]
        new = tuple(usage[i] + row[i] for i in range(k))
        return all(new[i] <= limit[i] for i in range(k)), new

    start = (ZERO,) * k
    if g.kind == "path":
        yield from _paths(inst, limit, counter)
        return
    if g.kind == "matroid":
        oracle = mt.RankOracle(g.matroid)
        m = oracle.m

        def rec(e, chosen, usage):
            counter.tick()
            if e == m:
                yield frozenset(chosen)
                return
            yield from rec(e + 1, chosen, usage)
            ok, new = fits(usage, e)
            if ok and oracle.independent(chosen + [e]):
                yield from rec(e + 1, chosen + [e], new)

        yield from rec(0, [], start)
        return

    graph = g.graph
    m, n = graph.m, graph.n
    edges = graph.edges
    if g.kind in ("matching", "perfect_matching"):
        want = n // 2 if g.kind == "perfect_matching" else None
        if want is not None and n % 2:
            return

        def rec(e, chosen, used, usage):
            counter.tick()
            if want is not None and len(chosen) + (m - e) < want:
                return
            if e == m:
                if want is None or len(chosen) == want:
                    yield frozenset(chosen)
                return
            yield from rec(e + 1, chosen, used, usage)
            u, v = edges[e]
            if u not in used and v not in used:
                ok, new = fits(usage, e)
                if ok:
                    yield from rec(e + 1, chosen + [e], used | {u, v}, new)

        yield from rec(0, [], frozenset(), start)
        return

    if g.kind in ("forest", "spanning_tree"):
        want = n - 1 if g.kind == "spanning_tree" else None

        def acyclic(ids):
            uf = UnionFind(n)
            return all(uf.union(*edges[i]) for i in ids)

        def rec(e, chosen, usage):
            counter.tick()
            if want is not None and len(chosen) + (m - e) < want:
                return
            if e == m:
                if want is None or len(chosen) == want:
                    yield frozenset(chosen)
                return
            yield from rec(e + 1, chosen, usage)
            if want is not None and len(chosen) == want:
                return
            ok, new = fits(usage, e)
            if ok and acyclic(chosen + [e]):
                yield from rec(e + 1, chosen + [e], new)

        yield from rec(0, [], start)
        return
    raise ValidationError(f"cannot enumerate ground kind {g.kind!r}")


def _paths(inst, limit, counter):
    graph, s, t = inst.ground.graph, inst.ground.s, inst.ground.t
    inc = graph.incident()
    k = inst.k
    if s == t:
        yield frozenset()
        return
    found = []

    def rec(node, visited, chosen, usage):
        counter.tick()
        if node == t:
            found.append(frozenset(chosen))
            return
        for e in inc[node]:
            u, v = graph.edges[e]
            nxt = v if u == node else u
            if nxt in visited:
                continue
            row = inst.lengths[e]
            new = tuple(usage[i] + row[i] for i in range(k))
            if limit is not None and any(new[i] > limit[i] for i in range(k)):
                continue
            rec(nxt, visited | {nxt}, chosen + [e], new)

    rec(s, frozenset({s}), [], (ZERO,) * k)
    # canonical order: by sorted edge tuple
    yield from sorted(set(found), key=lambda S: sorted(S))


def _better(value, witness, best_value, best_witness) -> bool:
    if best_value is None or value > best_value:
        return True
    return value == best_value and sorted(witness) < sorted(best_witness)


def brute_opt(inst, budgets=None, bound=None):
    """Exact optimum ``(value, witness)`` of the budgeted problem.

    Ties go to the lexicographically smallest sorted witness. Returns
    ``(None, None)`` when nothing is feasible, which can only happen for
    grounds that are not independence systems.
    """
    budgets = inst.budgets if budgets is None else budgets
    best_value, best = None, None
    for S in enumerate_solutions(inst, budgets, bound):
        value = inst.weight(S)
        if _better(value, S, best_value, best):
            best_value, best = value, S
    return best_value, best


def feasible(inst, budgets=None, bound=None) -> bool:
    budgets = inst.budgets if budgets is None else budgets
    return next(iter(enumerate_solutions(inst, budgets, bound)), None) is not None


@dataclass(frozen=True)
class ParetoPoint:
    weight: Fraction
    lengths: tuple
    witness: frozenset


def _dominates(a, b) -> bool:
    """a dominates b: weight >=, every length <=, at least one strict."""
    if a.weight < b.weight or any(x > y for x, y in zip(a.lengths, b.lengths)):
        return False
    return a.weight > b.weight or any(x < y for x, y in zip(a.lengths, b.lengths))


def pareto_enumerate(inst, bound=None) -> list:
    """Complete nondominated set over all of F (budgets ignored).

    Solutions with identical (weight, lengths) collapse to the smallest witness.
    Sorted by weight descending, then lengths ascending.
    """
    by_vector = {}
    for S in enumerate_solutions(inst, None, bound):
        key = (inst.weight(S), inst.usage(S))
        if key not in by_vector or sorted(S) < sorted(by_vector[key]):
            by_vector[key] = S
    points = [ParetoPoint(w, ls, S) for (w, ls), S in by_vector.items()]
    front = [p for p in points if not any(_dominates(q, p) for q in points)]
    front.sort(key=lambda p: (-p.weight, p.lengths, sorted(p.witness)))
    return front


def partition_bruteforce(alphas: Sequence, target) -> bool:
    """True iff some sub-multiset of ``alphas`` sums exactly to ``target``."""
    alphas = [as_rat(a) for a in alphas]
    if len(alphas) > 24:
        raise ResourceBoundError("partition brute force limited to 24 numbers")
    target = as_rat(target)
    sums = {ZERO}
    for a in alphas:
        sums |= {s + a for s in sums}
    return target in sums
