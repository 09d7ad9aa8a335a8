"""Seeded verification sweeps shared by ``multibudget verify`` and the acceptance tests.

Every sweep is a pure function of its case count: same count, same cases,
same summary. A case fails when any exact check raises or a returned
comparison is false.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from multibudget import curve as cv
from multibudget import matching as mm
from multibudget.errors import MultiBudgetError, ValidationError, check
from multibudget.feasibilize import exact_multicriteria_oracle, feasibilize, greedy_discard
from multibudget.instance import gen_partition_gadget, gen_random
from multibudget.lp import certify
from multibudget.matroid_ptas import check_face, solve_kbudget_matroid, solve_matroid_lp
from multibudget.numeric import ZERO
from multibudget.oracle import brute_opt, enumerate_solutions, feasible, partition_bruteforce


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def failed(self) -> int:
        return self.cases - self.passed

    @property
    def ok(self) -> bool:
        return self.cases > 0 and self.failed == 0

    def bump(self, key: str, by: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + by

    def summary(self, timing: bool = False) -> dict:
        doc = {
            "suite": self.name,
            "cases": self.cases,
            "passed": self.passed,
            "failed": self.failed,
            "counters": dict(sorted(self.counters.items())),
            "failures": self.failures[:20],
        }
        if timing:
            doc["seconds"] = round(self.seconds, 3)
        return doc


def _run(name: str, count: int, case: Callable, trace=None) -> SuiteResult:
    res = SuiteResult(name)
    start = time.perf_counter()
    for seed in range(count):
        res.cases += 1
        try:
            note = case(seed, res)
        except MultiBudgetError as exc:
            note = f"{type(exc).__name__}: {exc}"
        if note is None:
            res.passed += 1
        else:
            res.failures.append({"seed": seed, "reason": note})
        if trace is not None:
            trace({"suite": name, "seed": seed, "ok": note is None})
    res.seconds = time.perf_counter() - start
    return res


# -- matroid vertex structure ------------------------------------------------

MATROID_KINDS = ("uniform", "partition", "graphic", "linear")


def vertex_structure(count: int = 200, trace=None) -> SuiteResult:
    def case(seed, res):
        rng = random.Random(seed)
        kind = MATROID_KINDS[seed % len(MATROID_KINDS)]
        inst = gen_random(kind, rng.randint(3, 12), rng.randint(1, 3), seed)
        sol = solve_matroid_lp(inst)
        certify(sol)
        diag = check_face(sol, inst.k)
        res.bump(f"frac{diag.frac_count}")
        return None

    return _run("theorem4", count, case, trace)


def matroid_approximation(count: int = 30, trace=None) -> SuiteResult:
    def case(seed, res):
        rng = random.Random(seed)
        kind = MATROID_KINDS[seed % len(MATROID_KINDS)]
        eps = (Fraction(1, 2), Fraction(1, 3))[(seed // len(MATROID_KINDS)) % 2]
        inst = gen_random(kind, rng.randint(3, 10), rng.randint(1, 2), seed)
        S = solve_kbudget_matroid(inst, eps)
        opt, _ = brute_opt(inst)
        if not inst.within(S):
            return "output violates a budget"
        if inst.weight(S) < (1 - eps) * opt:
            return f"weight {inst.weight(S)} below (1-eps)*{opt}"
        if inst.weight(S) == opt:
            res.bump("optimal")
        return None

    return _run("corollary5", count, case, trace)


# -- curve rotation ----------------------------------------------------------


def _random_curve(rng: random.Random):
    segs = rng.randint(1, 20)

    def coord():
        den = rng.randint(1, 4)
        return Fraction(rng.randint(-10 * den, 10 * den), den)

    return cv.PolygonalCurve2(tuple((coord(), coord()) for _ in range(segs + 1)))


def curve_rotation(count: int = 500, trace=None) -> SuiteResult:
    def case(seed, res):
        rng = random.Random(seed)
        f = _random_curve(rng)
        choice = rng.randrange(6)
        mu = (Fraction(0), Fraction(1))[choice] if choice < 2 else Fraction(rng.randint(0, 12), 12)
        a, t = cv.find_intersection(f, mu)
        p0, pt = f.points[0], f.points[-1]
        target = (mu * p0[0] + (1 - mu) * pt[0], mu * p0[1] + (1 - mu) * pt[1])
        if cv.rotated_point(f, a, t) != target:
            return "rotation misses the target point"
        r = Fraction(rng.randint(0, 4 * int(f.tau)), 4)
        g = cv.rotate(f, r)
        if g.points[0] != p0 or g.points[-1] != pt:
            return "rotate moved an endpoint"
        probe = Fraction(rng.randint(0, 8 * int(f.tau)), 8)
        if g(probe) != cv.rotated_point(f, r, probe):
            return "rotated curve disagrees with the rotation formula"
        cv.base_rotation(f)
        return None

    return _run("lemma7", count, case, trace)


# -- matching patching -------------------------------------------------------


def _matching_instance(seed: int):
    rng = random.Random(seed)
    n = rng.randint(4, 10)
    m = rng.randint(n, min(2 * n, n * (n - 1) // 2))
    return gen_random("matching", m, 2, seed, n=n)


def _scan_integer_pairs(graph, x1, x2) -> Optional[str]:
    """Zeroing the certificate must leave a matching at every integer (a, t)."""
    comps = mm.sym_diff_decompose(graph, x1, x2)
    C = mm.build_aux_cycle(comps)
    if not mm.aux_cycle_ok(C, comps):
        return "auxiliary cycle breaks the adjacency rule"
    for a in range(C.tau + 1):
        for t in range(C.tau + 1):
            am = mm.almost_matching_at(graph, x1, C, a, t)
            if not mm.certificate_valid(am, graph):
                return f"certificate at (a, t) = ({a}, {t}) leaves a conflict"
    if C.tau:
        y = mm.almost_matching_at(graph, x1, C, 0, C.tau).y
        if y != tuple(Fraction(int(e in x2)) for e in range(graph.m)):
            return "y at t = tau differs from x''"
    return None


def patching(count: int = 100, trace=None) -> SuiteResult:
    """LP vertex, decomposition, the two-step patch chain, and extra patches on
    every pair of decomposition terms with several mixing weights."""

    def case(seed, res):
        inst = _matching_instance(seed)
        graph = inst.ground.graph
        sol, duals = mm.matching_lp_vertex(inst)
        certify(sol)
        terms = mm.decompose_three(sol, inst)
        res.bump(f"terms{len(terms)}")
        for _, x in terms:
            vx = tuple(Fraction(int(e in x)) for e in range(graph.m))
            check(mm.lagrangian_weight(inst, vx, duals) == duals.w_star, "decomposition term off the optimal Lagrangian level")
        z = mm.patch_chain(inst, sol, duals, terms)
        check(inst.within(z), "patched matching violates a budget")
        pairs = []
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                for mu in (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1)):
                    pairs.append((terms[i][1], terms[j][1], mu, ZERO))
        if len(terms) >= 2:
            (a1, x1), (a2, x2) = terms[0], terms[1]
            first = mm.patch(inst, x1, x2, a1 / (a1 + a2), duals, ZERO)
            if len(terms) == 3:
                pairs.append((first.z, terms[2][1], (a1 + a2), 2 * inst.w_max))
        for x1, x2, mu, gamma in pairs:
            pr = mm.patch(inst, x1, x2, mu, duals, gamma)
            res.bump("patches")
            if any(s < 0 for s in pr.length_slack) or pr.weight_slack < 0:
                return "patch inequality failed"
            bad = _scan_integer_pairs(graph, x1, x2)
            res.bump("scans")
            if bad:
                return bad
        return None

    return _run("lemma11", count, case, trace)


def matching_approximation(count: int = 50, trace=None) -> SuiteResult:
    def case(seed, res):
        inst = _matching_instance(seed)
        eps = (Fraction(1), Fraction(1, 2))[seed % 2]
        z = mm.solve_2budget_matching(inst, eps)
        opt, _ = brute_opt(inst)
        if not mm.is_matching(inst.ground.graph, z) or not inst.within(z):
            return "output is not a feasible matching"
        if inst.weight(z) < (1 - eps) * opt:
            return f"weight {inst.weight(z)} below (1-eps)*{opt}"
        if inst.weight(z) == opt:
            res.bump("optimal")
        return None

    return _run("theorem6", count, case, trace)


# -- feasibilization ---------------------------------------------------------


def overshooting_solver(inst, delta):
    """Among solutions within (1 + delta) L, the one using the most budget;
    ties to the heaviest, then the smallest witness."""
    cap = tuple((1 + delta) * b for b in inst.budgets)
    best, key = frozenset(), None
    for S in enumerate_solutions(inst, cap):
        k = (sum(inst.usage(S), ZERO), inst.weight(S), [-e for e in sorted(S)])
        if key is None or k > key:
            best, key = S, k
    return best


DISCARD_TRIALS = 500


def feasibilization(count: int = 40, trace=None) -> SuiteResult:
    """``count`` wrapper instances (each with the exact and the overshooting
    solver) followed by the greedy-discard trials."""
    kinds = ("forest", "uniform", "partition", "graphic", "linear")

    def case(seed, res):
        if seed >= count:
            return _discard_case(seed - count, res)
        rng = random.Random(seed)
        kind = kinds[seed % len(kinds)]
        k = rng.randint(1, 3)
        eps = (Fraction(1, 2), Fraction(1, 3))[(seed // len(kinds)) % 2]
        m = rng.randint(3, 10)
        inst = gen_random(kind, m, k, seed)
        S = feasibilize(inst, eps, exact_multicriteria_oracle)
        opt, _ = brute_opt(inst)
        if not inst.within(S):
            return "exact-oracle output violates a budget"
        if inst.weight(S) < (1 - eps) * opt:
            return f"weight {inst.weight(S)} below (1-eps)*{opt}"
        T = feasibilize(inst, eps, overshooting_solver)
        if not inst.within(T):
            return "overshooting-solver output violates a budget"
        res.bump("wrapper")
        return None

    def _discard_case(trial, res):
        rng = random.Random(10_000 + trial)
        inst = gen_random(("forest", "uniform", "matching")[trial % 3], rng.randint(3, 9), rng.randint(1, 3), trial)
        sols = list(enumerate_solutions(inst, inst.budgets))
        S = sols[rng.randrange(len(sols))]
        delta = Fraction(1, rng.randint(2, 6))
        kept, removed = greedy_discard(S, inst, tuple((1 - delta) * b for b in inst.budgets), delta)
        if not inst.within(kept, tuple((1 - delta) * b for b in inst.budgets)):
            return "kept set misses a target"
        res.bump("discard")
        return None

    return _run("theorem2", count + DISCARD_TRIALS, case, trace)


# -- PARTITION gadgets -------------------------------------------------------

GADGET_KINDS = ("spanning_tree", "perfect_matching", "path")


def gadget_case(seed: int):
    """Deterministic PARTITION input ``(alphas, target)`` with q <= 4."""
    rng = random.Random(seed)
    q = 1 + seed % 4
    alphas = [Fraction(rng.randint(0, 12), rng.choice((1, 1, 2))) for _ in range(q)]
    if rng.random() < 0.5:
        target = sum((a for a in alphas if rng.random() < 0.5), Fraction(0))
    else:
        target = Fraction(rng.randint(0, int(sum(alphas)) + 2))
    return alphas, target


def gadgets(count: int = 50, trace=None) -> SuiteResult:
    def case(seed, res):
        alphas, target = gadget_case(seed)
        q = len(alphas)
        want = partition_bruteforce(alphas, target)
        res.bump("yes" if want else "no")
        for kind in GADGET_KINDS:
            inst = gen_partition_gadget(kind, alphas, target)
            got = feasible(inst)
            if got != want:
                return f"{kind}: gadget feasibility {got} but partition says {want}"
            scale = 2 if kind == "perfect_matching" else 1
            for S in enumerate_solutions(inst):
                for i in range(q):
                    used = sum((inst.lengths[e][0] for e in S if 4 * i <= e < 4 * i + 4), Fraction(0))
                    if used not in (0, scale * alphas[i]):
                        return f"{kind}: cycle {i} carries length {used}"
        return None

    return _run("gadgets", count, case, trace)


SUITES = {
    "theorem4": (vertex_structure, 200),
    "corollary5": (matroid_approximation, 30),
    "lemma7": (curve_rotation, 500),
    "lemma11": (patching, 100),
    "theorem6": (matching_approximation, 50),
    "theorem2": (feasibilization, 40),
    "gadgets": (gadgets, 50),
}


def run_suite(name: str, count: Optional[int] = None, trace=None) -> list:
    """Run one suite (or all of them) and return the results."""
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        if n not in SUITES:
            raise ValidationError(f"unknown suite {n!r}; choose from {sorted(SUITES) + ['all']}")
        fn, default = SUITES[n]
        out.append(fn(default if count is None else count, trace))
    return out
