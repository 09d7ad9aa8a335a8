"""Exact rational simplex on the unit box, and a cutting-plane driver.

Every program here is ``max c.x`` subject to rows ``a.x <= b`` or ``a.x = b``
and ``0 <= x <= 1``. The upper bounds are carried as ordinary rows so their
duals come out of the same basis. Pivoting uses Bland's rule throughout, so
the returned vertex is a deterministic function of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from multibudget.errors import InfeasibleLP, InvariantViolation, ResourceBoundError, ValidationError
from multibudget.numeric import ONE, ZERO, as_rat, dot, format_rat, rank

LE, EQ = "<=", "="


@dataclass(frozen=True)
class Row:
    coeffs: tuple
    rel: str
    rhs: Fraction
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rat(v) for v in self.coeffs))
        object.__setattr__(self, "rhs", as_rat(self.rhs))
        if self.rel not in (LE, EQ):
            raise ValidationError(f"unsupported relation {self.rel!r}")

    def slack(self, x) -> Fraction:
        return self.rhs - dot(self.coeffs, x)


@dataclass
class LinearProgram:
    objective: tuple
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.objective = tuple(as_rat(v) for v in self.objective)
        for r in self.rows:
            if len(r.coeffs) != self.n:
                raise ValidationError(f"row {r.label!r} has {len(r.coeffs)} coefficients, expected {self.n}")

    @property
    def n(self) -> int:
        return len(self.objective)

    def dump(self) -> str:
        """Line-oriented text form, one constraint per line."""

        def expr(coeffs):
            terms = [f"{format_rat(c)} x{j}" for j, c in enumerate(coeffs) if c]
            return " + ".join(terms) if terms else "0"

        lines = [f"maximize: {expr(self.objective)}"]
        for i, r in enumerate(self.rows):
            name = r.label or f"r{i}"
            lines.append(f"{name}: {expr(r.coeffs)} {r.rel} {format_rat(r.rhs)}")
        lines.append(f"bounds: 0 <= x_j <= 1 for j in 0..{self.n - 1}")
        return "\n".join(lines) + "\n"


@dataclass
class VertexSolution:
    x: tuple
    objective_value: Fraction
    tight_rows: frozenset
    duals: tuple  # one per lp row
    bound_duals: tuple  # dual of x_j <= 1
    lp: LinearProgram
    rounds: int = 1

    @property
    def tight_lower(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.x) if v == 0)

    @property
    def tight_upper(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.x) if v == 1)

    def tight_matrix(self) -> list:
        n = len(self.x)
        mat = [list(self.lp.rows[i].coeffs) for i in sorted(self.tight_rows)]
        for j in sorted(self.tight_lower | self.tight_upper):
            mat.append([ONE if c == j else ZERO for c in range(n)])
        return mat

    def is_vertex(self) -> bool:
        """Tight rows and bounds have full column rank (exact)."""
        n = len(self.x)
        return n == 0 or rank(self.tight_matrix()) == n

    def dual_objective(self) -> Fraction:
        total = sum((y * r.rhs for y, r in zip(self.duals, self.lp.rows)), ZERO)
        return total + sum(self.bound_duals, ZERO)


class _Tableau:
    def __init__(self, rows: list, rhs: list, basis: list, ncols: int):
        self.T = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r: int, j: int, d: list) -> None:
        T, rhs = self.T, self.rhs
        row = T[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            for c in range(self.ncols):
                if row[c]:
                    row[c] *= inv
            rhs[r] *= inv
        nz = [c for c in range(self.ncols) if row[c]]
        for i in range(len(T)):
            if i == r:
                continue
            f = T[i][j]
            if f:
                ri = T[i]
                for c in nz:
                    ri[c] -= f * row[c]
                rhs[i] -= f * rhs[r]
        f = d[j]
        if f:
            for c in nz:
                d[c] -= f * row[c]
        self.basis[r] = j

    def reduced_costs(self, cost: list) -> list:
        d = list(cost)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.T[r]
                for c in range(self.ncols):
                    if row[c]:
                        d[c] -= cb * row[c]
        return d

    def run(self, cost: list, barred: frozenset) -> None:
        """Maximize ``cost`` from the current basis with Bland's rule."""
        d = self.reduced_costs(cost)
        while True:
            basic = set(self.basis)
            enter = next((j for j in range(self.ncols) if d[j] > 0 and j not in barred and j not in basic), None)
            if enter is None:
                return
            best_r, best_ratio = None, None
            for r, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if (
                        best_r is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[r] < self.basis[best_r])
                    ):
                        best_r, best_ratio = r, ratio
            if best_r is None:
                raise InvariantViolation("unbounded direction inside the unit box")
            self.pivot(best_r, enter, d)


def solve_vertex(lp: LinearProgram) -> VertexSolution:
    """Optimal basic solution of ``lp`` with row and bound duals.

    Raises :class:`InfeasibleLP` if no point of the box satisfies the rows.
    """
    n = lp.n
    all_rows = [(list(r.coeffs), r.rel, r.rhs) for r in lp.rows]
    all_rows += [([ONE if c == j else ZERO for c in range(n)], LE, ONE) for j in range(n)]
    M = len(all_rows)

    negated, surplus_of = [], {}
    ncols = n
    for i, (a, rel, b) in enumerate(all_rows):
        neg = b < 0
        negated.append(neg)
        if rel == LE and neg:
            surplus_of[i] = ncols
            ncols += 1
    ident = list(range(ncols, ncols + M))
    ncols += M
    artificial = set()
    T, rhs = [], []
    for i, (a, rel, b) in enumerate(all_rows):
        row = [ZERO] * ncols
        sgn = -1 if negated[i] else 1
        for j, v in enumerate(a):
            if v:
                row[j] = sgn * v
        if i in surplus_of:
            row[surplus_of[i]] = -ONE
        row[ident[i]] = ONE
        if rel == EQ or negated[i]:
            artificial.add(ident[i])
        T.append(row)
        rhs.append(sgn * b)
    tab = _Tableau(T, rhs, list(ident), ncols)

    if artificial:
        cost1 = [ZERO] * ncols
        for j in artificial:
            cost1[j] = -ONE
        tab.run(cost1, frozenset())
        infeas = sum((tab.rhs[r] for r, b in enumerate(tab.basis) if b in artificial), ZERO)
        if infeas > 0:
            raise InfeasibleLP("no point of the unit box satisfies the constraints")
        dummy = [ZERO] * ncols
        for r in range(M):
            if tab.basis[r] in artificial:
                j = next((c for c in range(ncols) if c not in artificial and tab.T[r][c] != 0), None)
                if j is not None:
                    tab.pivot(r, j, dummy)

    cost2 = [ZERO] * ncols
    for j in range(n):
        cost2[j] = lp.objective[j]
    tab.run(cost2, frozenset(artificial))

    x = [ZERO] * n
    for r, b in enumerate(tab.basis):
        if b < n:
            x[b] = tab.rhs[r]
    x = tuple(x)
    y = []
    for i in range(M):
        col = ident[i]
        val = sum((cost2[b] * tab.T[r][col] for r, b in enumerate(tab.basis) if cost2[b]), ZERO)
        y.append(-val if negated[i] else val)
    nu = len(lp.rows)
    tight = frozenset(i for i, r in enumerate(lp.rows) if dot(r.coeffs, x) == r.rhs)
    return VertexSolution(
        x=x,
        objective_value=dot(lp.objective, x),
        tight_rows=tight,
        duals=tuple(y[:nu]),
        bound_duals=tuple(y[nu:]),
        lp=lp,
    )


Oracle = Callable[[tuple], Optional[Row]]


@dataclass
class SeparationProblem:
    """``max objective.x`` over ``rows`` intersected with the polytope behind ``oracle``.

    ``oracle(x)`` returns a valid inequality violated by x, or None when x is
    inside the polytope.
    """

    objective: tuple
    rows: list
    oracle: Oracle
    max_rounds: int = 2000


def solve_with_separation(sp: SeparationProblem, trace=None) -> VertexSolution:
    """Cutting-plane loop: solve, separate, add the cut, repeat.

    The result is a vertex of the final relaxation lying in the true polytope,
    hence a vertex of the true polytope as well.
    """
    rows = list(sp.rows)
    for rounds in range(1, sp.max_rounds + 1):
        lp = LinearProgram(sp.objective, rows)
        sol = solve_vertex(lp)
        cut = sp.oracle(sol.x)
        if cut is None:
            sol.rounds = rounds
            return sol
        if dot(cut.coeffs, sol.x) <= cut.rhs:
            raise InvariantViolation(f"separation oracle returned a non-violated row {cut.label!r}")
        if trace is not None:
            trace({"event": "cut", "round": rounds, "label": cut.label})
        rows.append(cut)
    raise ResourceBoundError(f"cutting-plane loop exceeded {sp.max_rounds} rounds")


def certify(sol: VertexSolution) -> None:
    """Exact optimality and vertex certificate; raises on any failure."""
    lp, x = sol.lp, sol.x
    n = lp.n
    for j, v in enumerate(x):
        if not (0 <= v <= 1):
            raise InvariantViolation(f"x[{j}] = {v} outside the box")
    for i, r in enumerate(lp.rows):
        s = r.slack(x)
        if s < 0 or (r.rel == EQ and s != 0):
            raise InvariantViolation(f"row {i} violated")
        y = sol.duals[i]
        if r.rel == LE and y < 0:
            raise InvariantViolation(f"negative dual on inequality row {i}")
        if y and s:
            raise InvariantViolation(f"complementary slackness fails on row {i}")
    for j, u in enumerate(sol.bound_duals):
        if u < 0 or (u and x[j] != 1):
            raise InvariantViolation(f"bound dual {j} inconsistent")
    for j in range(n):
        red = lp.objective[j] - sum((sol.duals[i] * r.coeffs[j] for i, r in enumerate(lp.rows)), ZERO) - sol.bound_duals[j]
        if red > 0 or (red < 0 and x[j] != 0):
            raise InvariantViolation(f"reduced cost of x{j} is {red}")
    if sol.objective_value != sol.dual_objective():
        raise InvariantViolation("primal and dual objectives differ")
    if not sol.is_vertex():
        raise InvariantViolation("tight constraints do not determine x")
