"""Budgeted instances: data model, JSON form, and generators.

An instance asks for a max-weight solution S in the family F described by
``ground`` with ``lengths_i(S) <= budgets_i`` for every i.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from multibudget import matroid as mt
from multibudget.errors import DimensionError, ValidationError
from multibudget.graphs import GraphSpec
from multibudget.numeric import ONE, ZERO, as_rat, columns_dot, format_rat

GRAPH_KINDS = ("matching", "perfect_matching", "forest", "spanning_tree", "path")
INDEPENDENCE_KINDS = ("matroid", "matching", "forest")


@dataclass(frozen=True)
class GroundSpec:
    kind: str
    matroid: Optional[object] = None
    graph: Optional[GraphSpec] = None
    s: Optional[int] = None
    t: Optional[int] = None

    def __post_init__(self):
        if self.kind == "matroid":
            if not isinstance(self.matroid, mt.MatroidSpec):
                raise ValidationError("matroid ground needs a matroid spec")
        elif self.kind in GRAPH_KINDS:
            if self.graph is None:
                raise ValidationError(f"{self.kind} ground needs a graph")
            if self.kind == "path":
                n = self.graph.n
                if self.s is None or self.t is None or not (0 <= self.s < n and 0 <= self.t < n):
                    raise ValidationError("path ground needs endpoints s, t inside the graph")
        else:
            raise ValidationError(f"unknown ground kind {self.kind!r}")

    @property
    def m(self) -> int:
        return self.matroid.m if self.kind == "matroid" else self.graph.m

    @property
    def independence_system(self) -> bool:
        return self.kind in INDEPENDENCE_KINDS

    def to_json(self) -> dict:
        if self.kind == "matroid":
            return {"type": "matroid", "matroid": self.matroid.to_json()}
        doc = {"type": self.kind, "graph": self.graph.to_json()}
        if self.kind == "path":
            doc["s"], doc["t"] = self.s, self.t
        return doc

    @classmethod
    def from_json(cls, doc) -> "GroundSpec":
        if not isinstance(doc, dict) or "type" not in doc:
            raise ValidationError("ground must be an object with a 'type'")
        kind = doc["type"]
        if kind == "matroid":
            return cls("matroid", matroid=mt.matroid_from_json(doc.get("matroid", {})))
        if kind not in GRAPH_KINDS:
            raise ValidationError(f"unknown ground kind {kind!r}")
        graph = GraphSpec.from_json(doc.get("graph", {}))
        if kind == "path":
            return cls(kind, graph=graph, s=doc.get("s"), t=doc.get("t"))
        return cls(kind, graph=graph)


@dataclass(frozen=True)
class BudgetedInstance:
    weights: tuple
    lengths: tuple  # m rows of k entries
    budgets: tuple
    ground: GroundSpec
    sense: str = field(default="maximize")

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(as_rat(w) for w in self.weights))
        object.__setattr__(self, "lengths", tuple(tuple(as_rat(v) for v in row) for row in self.lengths))
        object.__setattr__(self, "budgets", tuple(as_rat(b) for b in self.budgets))
        m, k = len(self.weights), len(self.budgets)
        if self.sense != "maximize":
            raise ValidationError("only maximization instances are supported")
        if len(self.lengths) != m:
            raise DimensionError(f"{len(self.lengths)} length rows for {m} elements")
        for e, row in enumerate(self.lengths):
            if len(row) != k:
                raise DimensionError(f"element {e} has {len(row)} lengths, expected {k}")
        if self.ground.m != m:
            raise DimensionError(f"ground has {self.ground.m} elements, instance has {m}")
        if any(w < 0 for w in self.weights):
            raise ValidationError("negative weight")
        if any(v < 0 for row in self.lengths for v in row):
            raise ValidationError("negative length")
        if any(b < 0 for b in self.budgets):
            raise ValidationError("negative budget")

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def k(self) -> int:
        return len(self.budgets)

    def weight(self, S) -> Fraction:
        return sum((self.weights[e] for e in S), ZERO)

    def usage(self, S) -> tuple:
        """Length vector of the element set S."""
        out = [ZERO] * self.k
        for e in S:
            row = self.lengths[e]
            for i in range(self.k):
                out[i] += row[i]
        return tuple(out)

    def usage_of(self, x: Sequence) -> tuple:
        return columns_dot(self.lengths, x) if self.m else (ZERO,) * self.k

    def within(self, S, budgets=None) -> bool:
        budgets = self.budgets if budgets is None else budgets
        return all(u <= b for u, b in zip(self.usage(S), budgets))

    def length_column(self, i: int) -> tuple:
        return tuple(row[i] for row in self.lengths)

    @property
    def w_max(self) -> Fraction:
        return max(self.weights, default=ZERO)

    def with_budgets(self, budgets) -> "BudgetedInstance":
        return BudgetedInstance(self.weights, self.lengths, tuple(budgets), self.ground)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "sense": self.sense,
            "weights": [format_rat(w) for w in self.weights],
            "lengths": [[format_rat(v) for v in row] for row in self.lengths],
            "budgets": [format_rat(b) for b in self.budgets],
            "ground": self.ground.to_json(),
        }

    def digest(self) -> str:
        return hashlib.sha256(save(self).encode()).hexdigest()[:16]


def load(text: str) -> BudgetedInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not JSON: {exc}") from None
    return from_json(doc)


def from_json(doc) -> BudgetedInstance:
    if not isinstance(doc, dict):
        raise ValidationError("instance must be a JSON object")
    for key in ("m", "k", "weights", "lengths", "budgets", "ground"):
        if key not in doc:
            raise ValidationError(f"missing field {key!r}")
    inst = BudgetedInstance(
        weights=tuple(as_rat(v) for v in doc["weights"]),
        lengths=tuple(tuple(as_rat(v) for v in row) for row in doc["lengths"]),
        budgets=tuple(as_rat(v) for v in doc["budgets"]),
        ground=GroundSpec.from_json(doc["ground"]),
        sense=doc.get("sense", "maximize"),
    )
    if inst.m != doc["m"] or inst.k != doc["k"]:
        raise DimensionError(f"declared m={doc['m']}, k={doc['k']} but data has m={inst.m}, k={inst.k}")
    return inst


def save(inst: BudgetedInstance) -> str:
    return json.dumps(inst.to_json(), indent=2, sort_keys=True) + "\n"


# -- PARTITION gadgets -------------------------------------------------------


def chain_of_cycles(q: int):
    """G_q: 4-cycles (a_i, b_i, c_i, d_i) with c_i = a_{i+1}.

    Nodes are numbered in order of first appearance a_1, b_1, c_1, d_1, b_2, ...
    Edges per cycle, in order: a_i b_i, b_i c_i, c_i d_i, d_i a_i.
    Returns the graph and the per-cycle (a, b, c, d) node tuples.
    """
    cycles, edges = [], []
    a, nxt = 0, 1
    for _ in range(q):
        b, c, d = nxt, nxt + 1, nxt + 2
        nxt += 3
        cycles.append((a, b, c, d))
        edges += [(a, b), (b, c), (c, d), (d, a)]
        a = c
    return GraphSpec(nxt if q else 1, tuple(edges)), cycles


def disjoint_cycles(q: int):
    """q node-disjoint 4-cycles; cycle i uses nodes 4i..4i+3 in (a, b, c, d) order."""
    cycles, edges = [], []
    for i in range(q):
        a, b, c, d = 4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3
        cycles.append((a, b, c, d))
        edges += [(a, b), (b, c), (c, d), (d, a)]
    return GraphSpec(4 * q, tuple(edges)), cycles


def gen_partition_gadget(kind: str, alphas: Sequence, target, M=None) -> BudgetedInstance:
    """Two-budget instance that is feasible iff some subset of ``alphas`` sums to ``target``.

    The equality "l'(S) = L'" is split into ``l'(S) <= L'`` and, using that
    every solution has the same size s, ``(M - l')(S) <= s*M - L'``.
    Edge ``a_i b_i`` (and ``c_i d_i`` for perfect matchings) carries alpha_i;
    every other edge has l' = 0. All weights are 1.
    """
    alphas = tuple(as_rat(a) for a in alphas)
    target = as_rat(target)
    if not alphas:
        raise ValidationError("need at least one alpha")
    if any(a < 0 for a in alphas):
        raise ValidationError("alphas must be nonnegative")
    if target < 0:
        raise ValidationError("target must be nonnegative")
    total = sum(alphas, ZERO)
    M = total + 1 if M is None else as_rat(M)
    if M <= total:
        raise ValidationError(f"M={M} must exceed the alpha sum {total}")
    q = len(alphas)
    if kind in ("spanning_tree", "path"):
        graph, _ = chain_of_cycles(q)
        marked = {4 * i: alphas[i] for i in range(q)}
        if kind == "spanning_tree":
            size, ground = graph.n - 1, GroundSpec("spanning_tree", graph=graph)
        else:
            size = 2 * q
            ground = GroundSpec("path", graph=graph, s=0, t=graph.edges[4 * (q - 1) + 2][0])
        first_budget = target
    elif kind == "perfect_matching":
        graph, _ = disjoint_cycles(q)
        marked = {}
        for i in range(q):
            marked[4 * i] = alphas[i]
            marked[4 * i + 2] = alphas[i]
        size, ground = graph.n // 2, GroundSpec("perfect_matching", graph=graph)
        first_budget = 2 * target
    else:
        raise ValidationError(f"unknown gadget kind {kind!r}")
    lp = [marked.get(e, ZERO) for e in range(graph.m)]
    lengths = tuple((v, M - v) for v in lp)
    budgets = (first_budget, size * M - first_budget)
    if budgets[1] < 0:
        raise ValidationError("target too large for this M; second budget would be negative")
    return BudgetedInstance((ONE,) * graph.m, lengths, budgets, ground)


# -- random instances --------------------------------------------------------

RANDOM_KINDS = ("uniform", "partition", "graphic", "linear", "forest", "matching")


def _rand_rat(rng: random.Random, lo, hi) -> Fraction:
    den = rng.choice((1, 1, 2, 3))
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def random_graph(rng: random.Random, n: int, m: int) -> GraphSpec:
    if n < 2 and m > 0:
        raise ValidationError("need at least two nodes for a nonempty edge set")
    edges = []
    for _ in range(m):
        u, v = rng.sample(range(n), 2)
        edges.append((min(u, v), max(u, v)))
    return GraphSpec(n, tuple(edges))


def random_matroid(rng: random.Random, kind: str, m: int, n: Optional[int] = None):
    if kind == "uniform":
        return mt.Uniform(m, rng.randint(1, max(1, m)) if m else 0)
    if kind == "partition":
        nb = rng.randint(1, max(1, min(m, 4)))
        owner = [rng.randrange(nb) for _ in range(m)]
        blocks = [tuple(e for e in range(m) if owner[e] == j) for j in range(nb)]
        blocks = [b for b in blocks if b]
        caps = [rng.randint(1, len(b)) for b in blocks]
        return mt.Partition(tuple(blocks), tuple(caps))
    if kind == "graphic":
        return mt.Graphic(random_graph(rng, n or max(2, m // 2 + 2), m))
    if kind == "linear":
        d = rng.randint(2, 4)
        return mt.Linear(tuple(tuple(Fraction(rng.randint(-2, 2)) for _ in range(d)) for _ in range(m)))
    raise ValidationError(f"unknown matroid kind {kind!r}")


def _max_usage(inst: BudgetedInstance, i: int) -> Fraction:
    col = inst.length_column(i)
    g = inst.ground
    if g.kind == "matroid":
        return sum((col[e] for e in mt.greedy(g.matroid, col)), ZERO)
    if g.kind == "forest":
        return sum((col[e] for e in mt.greedy(mt.Graphic(g.graph), col)), ZERO)
    from multibudget.oracle import brute_opt

    probe = BudgetedInstance(col, tuple(() for _ in col), (), g)
    value, _ = brute_opt(probe)
    return value


def gen_random(
    kind: str,
    m: int,
    k: int,
    seed: int,
    weight_range=(1, 10),
    length_range=(0, 10),
    n: Optional[int] = None,
    budget_steps: int = 8,
) -> BudgetedInstance:
    """Seeded random instance whose budgets lie strictly between 0 and the
    largest length any solution can reach, so they actually bind."""
    if kind not in RANDOM_KINDS:
        raise ValidationError(f"unknown random kind {kind!r}; choose from {RANDOM_KINDS}")
    if m < 0 or k < 0:
        raise ValidationError("m and k must be nonnegative")
    rng = random.Random(seed)
    if kind in ("forest", "matching"):
        nodes = n if n is not None else (max(2, m // 2 + 2) if kind == "forest" else max(2, min(10, m)))
        ground = GroundSpec(kind, graph=random_graph(rng, nodes, m))
    else:
        ground = GroundSpec("matroid", matroid=random_matroid(rng, kind, m, n))
    weights = tuple(_rand_rat(rng, *weight_range) for _ in range(m))
    lengths = tuple(tuple(_rand_rat(rng, *length_range) for _ in range(k)) for _ in range(m))
    inst = BudgetedInstance(weights, lengths, (ZERO,) * k, ground)
    budgets = []
    for i in range(k):
        hi = _max_usage(inst, i)
        budgets.append(hi * Fraction(rng.randint(1, budget_steps - 1), budget_steps))
    return inst.with_budgets(budgets)
