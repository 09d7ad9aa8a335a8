"""Small undirected-multigraph helpers shared by the ground structures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from multibudget.errors import ValidationError


@dataclass(frozen=True)
class GraphSpec:
    """Undirected multigraph. Element id ``e`` is ``edges[e]``."""

    n: int
    edges: tuple  # tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if self.n < 0:
            raise ValidationError("negative node count")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge ({u},{v}) has endpoint outside [0,{self.n})")
            if u == v:
                raise ValidationError(f"self-loop at node {u}")

    @property
    def m(self) -> int:
        return len(self.edges)

    def incident(self) -> list:
        """Per-node list of incident edge ids."""
        inc = [[] for _ in range(self.n)]
        for e, (u, v) in enumerate(self.edges):
            inc[u].append(e)
            inc[v].append(e)
        return inc

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, doc) -> "GraphSpec":
        try:
            return cls(int(doc["n"]), tuple(tuple(int(x) for x in e) for e in doc["edges"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad graph spec: {exc}") from None


class UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, u: int) -> int:
        p = self.parent
        while p[u] != u:
            p[u] = p[p[u]]
            u = p[u]
        return u

    def union(self, u: int, v: int) -> bool:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if ru < rv:
            ru, rv = rv, ru
        self.parent[ru] = rv
        return True


def forest_rank(n: int, edges: Sequence, ids: Iterable[int]) -> int:
    uf = UnionFind(n)
    return sum(1 for e in ids if uf.union(*edges[e]))


def is_forest(graph: GraphSpec, ids: Iterable[int]) -> bool:
    uf = UnionFind(graph.n)
    return all(uf.union(*graph.edges[e]) for e in ids)


def is_matching(graph: GraphSpec, ids: Iterable[int]) -> bool:
    seen = set()
    for e in ids:
        u, v = graph.edges[e]
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return True


def is_perfect_matching(graph: GraphSpec, ids: Iterable[int]) -> bool:
    ids = list(ids)
    return is_matching(graph, ids) and 2 * len(ids) == graph.n


def is_spanning_tree(graph: GraphSpec, ids: Iterable[int]) -> bool:
    ids = list(ids)
    return len(ids) == graph.n - 1 and is_forest(graph, ids)


def is_st_path(graph: GraphSpec, ids: Iterable[int], s: int, t: int) -> bool:
    """True iff the edge set is exactly one simple s-t path."""
    ids = list(ids)
    if s == t:
        return not ids
    deg = {}
    for e in ids:
        for x in graph.edges[e]:
            deg[x] = deg.get(x, 0) + 1
    if deg.get(s) != 1 or deg.get(t) != 1:
        return False
    if any(d != 2 for x, d in deg.items() if x not in (s, t)):
        return False
    # degree pattern plus connectivity (no extra cycles) makes it a path
    return len(ids) == len(deg) - 1 and is_forest(graph, ids)
