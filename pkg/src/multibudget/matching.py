"""2-budgeted matching: LP vertex, three-matching decomposition, and patching.

Matchings are frozensets of edge ids. The patching step walks the symmetric
difference of two matchings as one cyclic sequence, reads the two lengths
along it as a polygonal curve, and uses a curve rotation to hit the length
vector of any convex combination of the two matchings with a vector that is
a matching except on a two-edge certificate. Rounding that vector gives the
patched matching.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from multibudget.config import default_config
from multibudget.curve import PolygonalCurve2, find_intersection
from multibudget.errors import InfeasibleLP, ResourceBoundError, ValidationError, check
from multibudget.graphs import GraphSpec, is_matching
from multibudget.instance import BudgetedInstance, GroundSpec
from multibudget.lp import EQ, LE, Row, SeparationProblem, certify, solve_with_separation
from multibudget.matroid_ptas import budget_rows
from multibudget.numeric import ONE, ZERO, as_rat, dot, floor_rat, format_rat



# -- matching polytope -------------------------------------------------------


def _edge_masks(graph: GraphSpec):
    return [(1 << u) | (1 << v) for u, v in graph.edges]


def polytope_rows(graph: GraphSpec, bound: int = 14) -> list:
    """Every degree row and every odd-set row of P_M that involves an edge."""
    if graph.n > bound:
        raise ResourceBoundError(f"odd-set enumeration over {graph.n} nodes exceeds bound {bound}")
    m = graph.m
    rows = []
    inc = graph.incident()
    for v in range(graph.n):
        if inc[v]:
            coeffs = tuple(ONE if e in inc[v] else ZERO for e in range(m))
            rows.append(Row(coeffs, LE, ONE, f"deg{v}"))
    masks = _edge_masks(graph)
    for U in range(1 << graph.n):
        size = bin(U).count("1")
        if size < 3 or size % 2 == 0:
            continue
        inside = [e for e in range(m) if masks[e] & U == masks[e]]
        if inside:
            coeffs = tuple(ONE if masks[e] & U == masks[e] else ZERO for e in range(m))
            rows.append(Row(coeffs, LE, Fraction((size - 1) // 2), f"odd{U}"))
    return rows


def polytope_oracle(graph: GraphSpec, bound: int = 14):
    """Most violated degree or odd-set inequality, by exhaustive scan."""
    if graph.n > bound:
        raise ResourceBoundError(f"odd-set separation over {graph.n} nodes exceeds bound {bound}")
    m = graph.m
    inc = graph.incident()
    masks = _edge_masks(graph)

    def separate(x):
        best, best_gap = None, ZERO
        for v in range(graph.n):
            gap = sum((x[e] for e in inc[v]), ZERO) - 1
            if gap > best_gap:
                best, best_gap = ("deg", v), gap
        support = [e for e in range(m) if x[e] > 0]
        for U in range(1 << graph.n):
            size = bin(U).count("1")
            if size < 3 or size % 2 == 0:
                continue
            gap = sum((x[e] for e in support if masks[e] & U == masks[e]), ZERO) - (size - 1) // 2
            if gap > best_gap:
                best, best_gap = ("odd", U), gap
        if best is None:
            return None
        kind, key = best
        if kind == "deg":
            return Row(tuple(ONE if e in inc[key] else ZERO for e in range(m)), LE, ONE, f"deg{key}")
        size = bin(key).count("1")
        coeffs = tuple(ONE if masks[e] & key == masks[e] else ZERO for e in range(m))
        return Row(coeffs, LE, Fraction((size - 1) // 2), f"odd{key}")

    return separate


def in_polytope(graph: GraphSpec, x, bound: int = 14) -> bool:
    if any(v < 0 for v in x):
        return False
    return polytope_oracle(graph, bound)(x) is None


# -- LP vertex and Lagrangian ------------------------------------------------


@dataclass(frozen=True)
class LagrangianDuals:
    lam: tuple  # one multiplier per budget
    budgets: tuple
    w_star: Fraction


def lagrangian_weight(inst: BudgetedInstance, x, duals: LagrangianDuals) -> Fraction:
    usage = inst.usage_of(x)
    penalty = sum((l * (u - b) for l, u, b in zip(duals.lam, usage, duals.budgets)), ZERO)
    return dot(inst.weights, x) - penalty


def matching_lp_vertex(inst: BudgetedInstance, cfg=None):
    """Vertex of ``max w.x`` over P_M with the budget rows, plus budget duals.

    Budget rows are rows 0..k-1 of the returned solution's LP. Degree rows are
    seeded up front; odd sets arrive as cuts.
    """
    cfg = cfg or default_config()
    graph = _graph_of(inst)
    if graph.n > cfg.odd_set_bound:
        raise ResourceBoundError(f"{graph.n} nodes exceeds the odd-set bound {cfg.odd_set_bound}")
    inc = graph.incident()
    seed = [
        Row(tuple(ONE if e in inc[v] else ZERO for e in range(graph.m)), LE, ONE, f"deg{v}")
        for v in range(graph.n)
        if len(inc[v]) > 1
    ]
    sp = SeparationProblem(inst.weights, budget_rows(inst) + seed, polytope_oracle(graph, cfg.odd_set_bound), cfg.max_cut_rounds)
    sol = solve_with_separation(sp)
    duals = LagrangianDuals(tuple(sol.duals[: inst.k]), inst.budgets, sol.objective_value)
    check(lagrangian_weight(inst, sol.x, duals) == duals.w_star, "Lagrangian weight of the optimum differs from w*")
    return sol, duals


def _graph_of(inst) -> GraphSpec:
    if inst.ground.kind != "matching":
        raise ValidationError("expected a matching ground")
    return inst.ground.graph


def _indicator(S, m) -> tuple:
    return tuple(ONE if e in S else ZERO for e in range(m))


def decompose_three(sol, inst: BudgetedInstance, cfg=None) -> list:
    """Write the vertex ``sol.x`` as a convex combination of at most three matchings.

    Peels extreme points: take an integral vertex v of the minimal face of P_M
    containing the current point p, push p away from v until it hits a new
    facet, and record v with the matching weight. Returns ``[(alpha, M), ...]``.
    """
    cfg = cfg or default_config()
    graph = _graph_of(inst)
    m = graph.m
    rows = polytope_rows(graph, cfg.odd_set_bound)
    oracle = polytope_oracle(graph, cfg.odd_set_bound)
    p = tuple(sol.x)
    coef = ONE
    terms = []
    for step in range(3):
        if all(v.denominator == 1 for v in p):
            terms.append((coef, frozenset(e for e in range(m) if p[e] == 1)))
            break
        check(step < 2, "point needs a fourth matching; vertex is not on a face of dimension <= 2")
        face = [Row(r.coeffs, EQ, r.rhs, r.label) for r in rows if dot(r.coeffs, p) == r.rhs]
        face += [Row(_indicator({e}, m), EQ, ZERO, f"zero{e}") for e in range(m) if p[e] == 0]
        vert = solve_with_separation(SeparationProblem(inst.weights, face, oracle, cfg.max_cut_rounds)).x
        check(all(v.denominator == 1 for v in vert), "face vertex is fractional")
        d = tuple(a - b for a, b in zip(p, vert))
        steps = [p[e] / -d[e] for e in range(m) if d[e] < 0]
        for r in rows:
            ad = dot(r.coeffs, d)
            if ad > 0:
                steps.append((r.rhs - dot(r.coeffs, p)) / ad)
        s = min(steps)
        check(s > 0, "zero step while peeling; point not in the relative interior")
        terms.append((coef * s / (1 + s), frozenset(e for e in range(m) if vert[e] == 1)))
        coef = coef / (1 + s)
        p = tuple(a + s * b for a, b in zip(p, d))
    total = [ZERO] * m
    for alpha, M in terms:
        check(alpha > 0 and is_matching(graph, M), "bad decomposition term")
        for e in M:
            total[e] += alpha
    check(tuple(total) == tuple(sol.x), "decomposition does not reproduce x*")
    check(sum((a for a, _ in terms), ZERO) == 1, "decomposition weights do not sum to 1")
    return terms


# -- symmetric difference and the auxiliary cycle ----------------------------


@dataclass(frozen=True)
class Component:
    edges: tuple
    nodes: tuple
    cycle: bool


def sym_diff_decompose(graph: GraphSpec, x1, x2) -> list:
    """Paths and cycles of ``x1 ^ x2``, sorted by smallest edge id.

    Paths run from their smaller end node; cycles start at their smallest edge
    and continue toward the smaller-id neighbouring edge.
    """
    D = set(x1) ^ set(x2)
    at = {}
    for e in sorted(D):
        for v in graph.edges[e]:
            at.setdefault(v, []).append(e)
    for v, es in at.items():
        check(len(es) <= 2, f"node {v} has degree {len(es)} in a symmetric difference of matchings")

    def other(e, v):
        u, w = graph.edges[e]
        return w if u == v else u

    def walk(start_node, first_edge):
        edges, nodes = [first_edge], [start_node]
        node, e = other(first_edge, start_node), first_edge
        nodes.append(node)
        while True:
            nxt = [f for f in at[node] if f != e]
            if not nxt or nxt[0] == first_edge:
                return edges, nodes
            e = nxt[0]
            if e in edges:
                return edges, nodes
            edges.append(e)
            node = other(e, node)
            nodes.append(node)

    used, comps = set(), []
    for v in sorted(at):
        if len(at[v]) == 1 and at[v][0] not in used:
            edges, nodes = walk(v, at[v][0])
            used.update(edges)
            comps.append(Component(tuple(edges), tuple(nodes), False))
    for e in sorted(D):
        if e in used:
            continue
        u, v = graph.edges[e]
        nu = [f for f in at[u] if f != e]
        nv = [f for f in at[v] if f != e]
        # leave through the endpoint whose other edge has the smaller id
        start = v if nu and nv and nu[0] < nv[0] else u
        edges, nodes = walk(start, e)
        used.update(edges)
        comps.append(Component(tuple(edges), tuple(nodes[:-1]), True))
    comps.sort(key=lambda c: min(c.edges))
    return comps


@dataclass(frozen=True)
class AuxCycle:
    order: tuple

    @property
    def tau(self) -> int:
        return len(self.order)


def build_aux_cycle(components) -> AuxCycle:
    comps = sorted(components, key=lambda c: min(c.edges))
    return AuxCycle(tuple(e for c in comps for e in c.edges))


def aux_cycle_ok(C: AuxCycle, components) -> bool:
    """Cyclically consecutive entries are consecutive inside one component or
    sit at a junction between component blocks."""
    order = C.order
    if sorted(order) != sorted(e for c in components for e in c.edges):
        return False
    block = {}
    for idx, c in enumerate(components):
        for pos, e in enumerate(c.edges):
            block[e] = (idx, pos)
    for i in range(len(order)):
        e, f = order[i], order[(i + 1) % len(order)]
        (ce, pe), (cf, pf) = block[e], block[f]
        comp = components[ce]
        last = len(comp.edges) - 1
        if ce == cf and pf == pe + 1:
            continue
        if pe == last and pf == 0:
            continue  # junction: end of one block, start of the next (or itself)
        return False
    return True


# -- almost matchings --------------------------------------------------------


@dataclass(frozen=True)
class AlmostMatching:
    y: tuple
    certificate: frozenset


def _s_vector(u: Fraction, tau: int) -> list:
    fl = floor_rat(u)
    out = [ZERO] * tau
    for i in range(tau):
        if i < fl:
            out[i] = ONE
        elif i == fl:
            out[i] = u - fl
    return out


def arc_vector(C: AuxCycle, a, t) -> list:
    """Fractional indicator over positions of C for the arc of length t from a."""
    tau = C.tau
    a, t = as_rat(a), as_rat(t)
    if not (0 <= a <= tau and 0 <= t <= tau):
        raise ValidationError(f"(a, t) = ({a}, {t}) outside [0, {tau}]^2")
    sa = _s_vector(a, tau)
    if a + t <= tau:
        sb = _s_vector(a + t, tau)
        return [sb[i] - sa[i] for i in range(tau)]
    sb = _s_vector(a + t - tau, tau)
    return [sb[i] + ONE - sa[i] for i in range(tau)]


def almost_matching_at(graph: GraphSpec, x1, C: AuxCycle, a, t) -> AlmostMatching:
    """``x1`` with the arc ``[a, a + t)`` of C flipped, plus the two-edge certificate."""
    a, t = as_rat(a), as_rat(t)
    arc = arc_vector(C, a, t)
    y = [ONE if e in x1 else ZERO for e in range(graph.m)]
    for i, e in enumerate(C.order):
        y[e] = abs(y[e] - arc[i])
    tau = C.tau
    cert = frozenset({C.order[floor_rat(a) % tau], C.order[floor_rat(a + t) % tau]}) if tau else frozenset()
    check(all(y[e].denominator == 1 for e in range(graph.m) if e not in cert), "fractional entry outside the certificate")
    if t == 0:
        check(all(y[e] == (e in x1) for e in range(graph.m)), "y at t=0 differs from x'")
    return AlmostMatching(tuple(y), cert)


def certificate_valid(am: AlmostMatching, graph: GraphSpec) -> bool:
    """Zeroing the certificate leaves an integral matching vector."""
    rest = [e for e in range(graph.m) if e not in am.certificate]
    if any(am.y[e].denominator != 1 for e in rest):
        return False
    return is_matching(graph, [e for e in rest if am.y[e] == 1])


def to_matching(am: AlmostMatching, graph: GraphSpec, weights) -> frozenset:
    """Zero the certificate, then a greedy maximal matching on what is left."""
    support = [e for e in range(graph.m) if e not in am.certificate and am.y[e] == 1]
    used, z = set(), []
    for e in sorted(support, key=lambda e: (-weights[e], e)):
        u, v = graph.edges[e]
        if u not in used and v not in used:
            used.update((u, v))
            z.append(e)
    z = frozenset(z)
    w_max = max(weights, default=ZERO)
    check(sum((weights[e] for e in z), ZERO) >= dot(weights, am.y) - 2 * w_max, "rounding lost more than 2 w_max")
    return z


# -- patching ----------------------------------------------------------------


@dataclass
class PatchResult:
    z: frozenset
    a: Fraction
    t: Fraction
    y: Optional[AlmostMatching]
    aux: Optional[AuxCycle]
    length_slack: tuple
    weight_slack: Fraction


def length_curve(inst: BudgetedInstance, x1, C: AuxCycle) -> PolygonalCurve2:
    """Length vector of x1 with the first i cycle edges flipped, i = 0..tau."""
    cur = list(inst.usage(x1))
    pts = [tuple(cur)]
    for e in C.order:
        sign = -1 if e in x1 else 1
        row = inst.lengths[e]
        cur = [cur[i] + sign * row[i] for i in range(inst.k)]
        pts.append(tuple(cur))
    return PolygonalCurve2(pts)


def patch(inst: BudgetedInstance, x1, x2, mu, duals: LagrangianDuals, gamma, trace=None) -> PatchResult:
    """A matching no longer than ``mu x1 + (1 - mu) x2`` in either length and
    at most ``2 w_max + gamma`` lighter, given both inputs have Lagrangian
    weight at least ``w* - gamma``."""
    graph = _graph_of(inst)
    if inst.k != 2:
        raise ValidationError("patching works with exactly two budgets")
    mu, gamma = as_rat(mu), as_rat(gamma)
    if not (0 <= mu <= 1):
        raise ValidationError(f"mu={mu} outside [0, 1]")
    m = graph.m
    v1, v2 = _indicator(x1, m), _indicator(x2, m)
    for name, v in (("x'", v1), ("x''", v2)):
        check(lagrangian_weight(inst, v, duals) >= duals.w_star - gamma, f"{name} has Lagrangian weight below w* - gamma")
    x_mu = tuple(mu * a + (1 - mu) * b for a, b in zip(v1, v2))
    target_len = inst.usage_of(x_mu)
    target_w = dot(inst.weights, x_mu)
    if set(x1) == set(x2):
        z, a, t, am, C, f = frozenset(x1), ZERO, ZERO, None, None, None
    else:
        C = build_aux_cycle(sym_diff_decompose(graph, x1, x2))
        f = length_curve(inst, x1, C)
        a, t = find_intersection(f, mu)
        am = almost_matching_at(graph, x1, C, a, t)
        check(inst.usage_of(am.y) == target_len, "almost matching misses the target lengths")
        mirror = almost_matching_at(graph, x1, C, (a + t) % C.tau, C.tau - t)
        check(mirror.y == tuple(p + q - r for p, q, r in zip(v1, v2, am.y)), "mirror identity fails")
        z = to_matching(am, graph, inst.weights)
    used = inst.usage(z)
    len_slack = tuple(b - u for b, u in zip(target_len, used))
    w_slack = inst.weight(z) - (target_w - 2 * inst.w_max - gamma)
    check(all(s >= 0 for s in len_slack), "patched matching is longer than x_mu")
    check(w_slack >= 0, "patched matching is lighter than w.x_mu - 2 w_max - gamma")
    if trace is not None:
        trace(
            {
                "event": "patch",
                "mu": format_rat(mu),
                "gamma": format_rat(gamma),
                "tau": C.tau if C else 0,
                "a": format_rat(a),
                "t": format_rat(t),
                "z": sorted(z),
                "length_slack": [format_rat(s) for s in len_slack],
                "weight_slack": format_rat(w_slack),
                "curve": [[format_rat(p), format_rat(q)] for p, q in f.points] if f else [],
            }
        )
    return PatchResult(z, a, t, am, C, len_slack, w_slack)


# -- the scheme --------------------------------------------------------------


def matching_guess_size(eps) -> int:
    eps = as_rat(eps)
    if not (0 < eps <= 1) or (6 / eps).denominator != 1:
        raise ValidationError(f"matching-ptas needs 6/eps to be an integer, got eps={format_rat(eps)}")
    return int(6 / eps)


def reduce_for_guess(inst: BudgetedInstance, guess):
    """Drop the guess's endpoints, heavier edges and individually over-budget edges.

    Nodes left without edges are removed and the rest renumbered. Returns
    ``(reduced instance, original edge ids)`` or ``(None, ())`` if the guess
    itself is not a feasible matching.
    """
    graph = _graph_of(inst)
    guess = frozenset(guess)
    if not is_matching(graph, guess) or not inst.within(guess):
        return None, ()
    covered = {v for e in guess for v in graph.edges[e]}
    residual = tuple(b - u for b, u in zip(inst.budgets, inst.usage(guess)))
    threshold = min((inst.weights[e] for e in guess), default=None)
    keep = tuple(
        e
        for e in range(inst.m)
        if e not in guess
        and not (set(graph.edges[e]) & covered)
        and (threshold is None or inst.weights[e] <= threshold)
        and all(inst.lengths[e][i] <= residual[i] for i in range(inst.k))
    )
    nodes = sorted({v for e in keep for v in graph.edges[e]})
    pos = {v: i for i, v in enumerate(nodes)}
    sub = GraphSpec(len(nodes), tuple((pos[graph.edges[e][0]], pos[graph.edges[e][1]]) for e in keep))
    reduced = BudgetedInstance(
        tuple(inst.weights[e] for e in keep),
        tuple(inst.lengths[e] for e in keep),
        residual,
        GroundSpec("matching", graph=sub),
    )
    return reduced, keep


def patch_chain(red: BudgetedInstance, sol, duals, terms, trace=None) -> frozenset:
    """Combine the decomposition into one matching within the LP's lengths."""
    w_max = red.w_max
    if len(terms) == 1:
        return terms[0][1]
    (a1, x1), (a2, x2) = terms[0], terms[1]
    first = patch(red, x1, x2, a1 / (a1 + a2), duals, ZERO, trace)
    if len(terms) == 2:
        return first.z
    a3, x3 = terms[2]
    second = patch(red, first.z, x3, (a1 + a2) / (a1 + a2 + a3), duals, 2 * w_max, trace)
    z1, z2 = first.z, second.z
    mixed = [(a1 + a2) * u + a3 * v for u, v in zip(red.usage(z1), red.usage(x3))]
    chain = zip(red.usage(z2), mixed, red.usage_of(sol.x), red.budgets)
    check(all(p <= q <= r <= b for p, q, r, b in chain), "budget chain z'' <= v <= x* <= L broken")
    check(red.weight(z2) >= duals.w_star - 6 * w_max, "final matching lighter than w* - 6 w_max")
    return z2


def run_guess(inst: BudgetedInstance, guess, eps, cfg=None):
    """One guess of the scheme: ``(candidate or None, trace records)``."""
    records = []
    red, ids = reduce_for_guess(inst, guess)
    head = {"guess": sorted(guess)}
    if red is None:
        head["skipped"] = "guess infeasible"
        return None, [head]
    try:
        sol, duals = matching_lp_vertex(red, cfg)
    except InfeasibleLP:
        head["skipped"] = "reduced LP infeasible"
        return None, [head]
    certify(sol)
    terms = decompose_three(sol, red, cfg)
    head.update(
        lp_value=format_rat(sol.objective_value),
        lam=[format_rat(l) for l in duals.lam],
        alphas=[format_rat(a) for a, _ in terms],
    )
    records.append(head)
    z = patch_chain(red, sol, duals, terms, records.append)
    candidate = frozenset(guess) | frozenset(ids[e] for e in z)
    check(is_matching(_graph_of(inst), candidate), "candidate is not a matching")
    check(inst.within(candidate), "candidate violates a budget")
    records.append({"event": "candidate", "candidate": sorted(candidate), "weight": format_rat(inst.weight(candidate))})
    return candidate, records


def enumerate_guesses(inst: BudgetedInstance, h: int):
    from multibudget.oracle import enumerate_solutions

    found = [S for S in enumerate_solutions(inst, inst.budgets) if len(S) <= h]
    found.sort(key=lambda S: (len(S), sorted(S)))
    return found


def _run_guess_star(args):
    return run_guess(*args)


def solve_2budget_matching(inst: BudgetedInstance, eps, cfg=None, trace=None, jobs: int = 1) -> frozenset:
    """(1 - eps)-approximate max-weight matching under two budgets."""
    _graph_of(inst)
    if inst.k != 2:
        raise ValidationError(f"matching-ptas needs exactly 2 budgets, instance has {inst.k}")
    h = matching_guess_size(eps)
    work = [(inst, g, as_rat(eps), cfg) for g in enumerate_guesses(inst, h)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_guess_star, work, chunksize=4))
    else:
        results = [_run_guess_star(w) for w in work]
    best = frozenset()
    for cand, recs in results:
        if trace is not None:
            for r in recs:
                trace(r)
        if cand is None:
            continue
        wc, wb = inst.weight(cand), inst.weight(best)
        if wc > wb or (wc == wb and sorted(cand) < sorted(best)):
            best = cand
    return best
