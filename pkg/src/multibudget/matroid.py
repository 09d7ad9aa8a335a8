"""Matroid rank oracles: uniform, partition, graphic, linear, and minors.

Minors (contraction / deletion) are wrappers that offset the base rank,
``r'(T) = r(T + C) - r(C)``, and relabel the surviving elements to
``0..m'-1`` in increasing base-id order.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from multibudget.errors import ResourceBoundError, ValidationError
from multibudget.graphs import GraphSpec, forest_rank
from multibudget.numeric import ZERO, as_rat, format_rat, rank as matrix_rank


def _ids(S: Iterable[int], m: int) -> frozenset:
    S = frozenset(S)
    for e in S:
        if not (isinstance(e, int) and 0 <= e < m):
            raise ValidationError(f"element id {e!r} outside [0,{m})")
    return S


@dataclass(frozen=True)
class Uniform:
    m: int
    r: int

    def __post_init__(self):
        if not (0 <= self.r <= self.m):
            raise ValidationError(f"uniform matroid needs 0 <= r <= m, got r={self.r}, m={self.m}")

    def _rank(self, S: frozenset) -> int:
        return min(len(S), self.r)

    def to_json(self):
        return {"type": "uniform", "m": self.m, "r": self.r}


@dataclass(frozen=True)
class Partition:
    blocks: tuple  # tuple[tuple[int, ...], ...]
    caps: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "caps", tuple(self.caps))
        if len(blocks) != len(self.caps):
            raise ValidationError("partition matroid: one cap per block")
        seen = sorted(e for b in blocks for e in b)
        if seen != list(range(len(seen))):
            raise ValidationError("partition matroid: blocks must partition 0..m-1")
        for b, c in zip(blocks, self.caps):
            if not (0 <= c <= len(b)):
                raise ValidationError(f"partition matroid: cap {c} invalid for block of size {len(b)}")
        owner = {}
        for j, b in enumerate(blocks):
            for e in b:
                owner[e] = j
        object.__setattr__(self, "_owner", owner)

    @property
    def m(self) -> int:
        return sum(len(b) for b in self.blocks)

    def _rank(self, S: frozenset) -> int:
        counts = [0] * len(self.blocks)
        for e in S:
            counts[self._owner[e]] += 1
        return sum(min(c, cap) for c, cap in zip(counts, self.caps))

    def to_json(self):
        return {"type": "partition", "blocks": [list(b) for b in self.blocks], "caps": list(self.caps)}


@dataclass(frozen=True)
class Graphic:
    graph: GraphSpec

    @property
    def m(self) -> int:
        return self.graph.m

    def _rank(self, S: frozenset) -> int:
        return forest_rank(self.graph.n, self.graph.edges, sorted(S))

    def to_json(self):
        return {"type": "graphic", "graph": self.graph.to_json()}


@dataclass(frozen=True)
class Linear:
    """Column ``e`` is the vector representing element ``e``."""

    columns: tuple

    def __post_init__(self):
        cols = tuple(tuple(as_rat(v) for v in c) for c in self.columns)
        object.__setattr__(self, "columns", cols)
        if cols and len({len(c) for c in cols}) != 1:
            raise ValidationError("linear matroid: columns of unequal length")

    @property
    def m(self) -> int:
        return len(self.columns)

    def _rank(self, S: frozenset) -> int:
        return matrix_rank([self.columns[e] for e in sorted(S)])

    def to_json(self):
        return {"type": "linear", "columns": [[format_rat(v) for v in c] for c in self.columns]}


@dataclass(frozen=True)
class Minor:
    """``base`` contracted by ``contracted`` and restricted to ``elements``.

    New element ``i`` is base element ``elements[i]``.
    """

    base: object
    elements: tuple
    contracted: frozenset

    @property
    def m(self) -> int:
        return len(self.elements)

    def _rank(self, S: frozenset) -> int:
        mapped = frozenset(self.elements[e] for e in S) | self.contracted
        return self.base._rank(mapped) - self.base._rank(self.contracted)

    def to_json(self):
        return {
            "type": "minor",
            "base": self.base.to_json(),
            "elements": list(self.elements),
            "contracted": sorted(self.contracted),
        }


MatroidSpec = (Uniform, Partition, Graphic, Linear, Minor)


def matroid_from_json(doc) -> object:
    try:
        kind = doc["type"]
        if kind == "uniform":
            return Uniform(int(doc["m"]), int(doc["r"]))
        if kind == "partition":
            return Partition(tuple(tuple(int(e) for e in b) for b in doc["blocks"]), tuple(int(c) for c in doc["caps"]))
        if kind == "graphic":
            return Graphic(GraphSpec.from_json(doc["graph"]))
        if kind == "linear":
            return Linear(tuple(tuple(as_rat(v) for v in c) for c in doc["columns"]))
        if kind == "minor":
            base = matroid_from_json(doc["base"])
            return Minor(base, tuple(int(e) for e in doc["elements"]), frozenset(int(e) for e in doc["contracted"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad matroid spec: {exc}") from None
    raise ValidationError(f"unknown matroid type {doc.get('type')!r}")


class RankOracle:
    """Memoizing rank oracle over a matroid spec.

    The memo is guarded by a lock so concurrent readers are safe.
    """

    def __init__(self, spec, memo: bool = True):
        self.spec = spec
        self.m = spec.m
        self._memo = {} if memo else None
        self._lock = threading.Lock()

    def rank(self, S: Iterable[int]) -> int:
        S = _ids(S, self.m)
        if self._memo is None:
            return self.spec._rank(S)
        with self._lock:
            hit = self._memo.get(S)
        if hit is not None:
            return hit
        r = self.spec._rank(S)
        with self._lock:
            self._memo[S] = r
        return r

    def independent(self, S: Iterable[int]) -> bool:
        S = frozenset(S)
        return self.rank(S) == len(S)


def as_oracle(spec_or_oracle) -> RankOracle:
    if isinstance(spec_or_oracle, RankOracle):
        return spec_or_oracle
    return RankOracle(spec_or_oracle)


def rank(oracle, S) -> int:
    return as_oracle(oracle).rank(S)


def independent(oracle, S) -> bool:
    return as_oracle(oracle).independent(S)


def greedy(oracle, weights: Sequence) -> frozenset:
    """Max-weight independent set: scan by weight descending, ties by id."""
    oracle = as_oracle(oracle)
    chosen = []
    for e in sorted(range(oracle.m), key=lambda e: (-weights[e], e)):
        if weights[e] <= 0:
            break
        if oracle.independent(chosen + [e]):
            chosen.append(e)
    return frozenset(chosen)


def separate(oracle, x: Sequence, bound: int = 20) -> Optional[frozenset]:
    """Most violated rank inequality ``x(S) <= r(S)``, or None if x is in P_I.

    Exhaustive over subsets of the support of x; adding a zero coordinate never
    raises x(S) and never lowers r(S), so the support suffices. Ties keep the
    first subset in increasing bitmask order.
    """
    oracle = as_oracle(oracle)
    if len(x) != oracle.m:
        raise ValidationError(f"point has {len(x)} coordinates, matroid has {oracle.m} elements")
    if oracle.m > bound:
        raise ResourceBoundError(f"separation over {oracle.m} elements exceeds bound {bound}")
    support = [e for e in range(oracle.m) if x[e] > 0]
    s = len(support)
    sums = [ZERO] * (1 << s)
    best, best_gap = None, ZERO
    for mask in range(1, 1 << s):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + x[support[low.bit_length() - 1]]
        S = frozenset(support[i] for i in range(s) if mask >> i & 1)
        gap = sums[mask] - oracle.rank(S)
        if gap > best_gap:
            best, best_gap = S, gap
    return best


def _remaining(m: int, S: frozenset) -> tuple:
    return tuple(e for e in range(m) if e not in S)


def contract(spec, S: Iterable[int]):
    """Contraction by an independent set; survivors relabelled in id order."""
    m = spec.m
    S = _ids(S, m)
    if not S:
        return spec
    if not RankOracle(spec, memo=False).independent(S):
        raise ValidationError(f"cannot contract dependent set {sorted(S)}")
    keep = _remaining(m, S)
    if isinstance(spec, Minor):
        return Minor(
            spec.base,
            tuple(spec.elements[e] for e in keep),
            spec.contracted | frozenset(spec.elements[e] for e in S),
        )
    return Minor(spec, keep, frozenset(S))


def delete(spec, S: Iterable[int]):
    m = spec.m
    S = _ids(S, m)
    if not S:
        return spec
    return restrict(spec, _remaining(m, S))


def restrict(spec, keep: Sequence[int]):
    """Keep only ``keep`` (in the given order) as the new ground set."""
    keep = tuple(keep)
    _ids(keep, spec.m)
    if isinstance(spec, Minor):
        return Minor(spec.base, tuple(spec.elements[e] for e in keep), spec.contracted)
    return Minor(spec, keep, frozenset())
