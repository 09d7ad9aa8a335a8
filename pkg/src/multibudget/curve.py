"""Polygonal curves in the plane and their cyclic rotations.

A curve built from breakpoints ``p_0..p_tau`` is parameterized one unit per
segment. Rotating by ``a`` gives

    f^a(t) = f(t + a) - f(a) + f(0)            if t + a <  tau
    f^a(t) = f(tau) - f(a) + f(a + t - tau)    if t + a >= tau

which keeps both endpoints. For every mu in [0, 1] some rotation passes
through ``mu f(0) + (1 - mu) f(tau)``; :func:`find_intersection` finds one.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from multibudget.errors import InvariantViolation, ValidationError, check
from multibudget.numeric import ONE, ZERO, as_rat, floor_rat


def _pt(p) -> tuple:
    x, y = p
    return (as_rat(x), as_rat(y))


@dataclass(frozen=True)
class PolygonalCurve2:
    """Piecewise-linear curve through ``points`` at parameters ``knots``.

    ``knots`` defaults to 0, 1, ..., tau. Rotations by a non-integer amount
    need one extra knot, which is why general knots are allowed.
    """

    points: tuple
    knots: Optional[tuple] = None

    def __post_init__(self):
        pts = tuple(_pt(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValidationError("a curve needs at least one segment")
        if self.knots is None:
            object.__setattr__(self, "knots", tuple(Fraction(i) for i in range(len(pts))))
        else:
            kn = tuple(as_rat(t) for t in self.knots)
            if len(kn) != len(pts) or kn[0] != 0 or any(b <= a for a, b in zip(kn, kn[1:])):
                raise ValidationError("knots must start at 0 and increase strictly, one per point")
            object.__setattr__(self, "knots", kn)

    @property
    def tau(self) -> Fraction:
        return self.knots[-1]

    @property
    def unit(self) -> bool:
        return all(k == i for i, k in enumerate(self.knots))

    def __call__(self, t) -> tuple:
        return evaluate(self, t)


def evaluate(f: PolygonalCurve2, t) -> tuple:
    t = as_rat(t)
    if not (0 <= t <= f.tau):
        raise ValidationError(f"parameter {t} outside [0, {f.tau}]")
    if t == f.tau:
        return f.points[-1]
    if f.unit:
        i = floor_rat(t)
    else:
        i = bisect.bisect_right(f.knots, t) - 1
    t0, t1 = f.knots[i], f.knots[i + 1]
    (x0, y0), (x1, y1) = f.points[i], f.points[i + 1]
    s = (t - t0) / (t1 - t0)
    return (x0 + s * (x1 - x0), y0 + s * (y1 - y0))


eval_curve = evaluate


def rotated_point(f: PolygonalCurve2, a, t) -> tuple:
    """``f^a(t)`` straight from the definition."""
    a, t = as_rat(a), as_rat(t)
    tau = f.tau
    if not (0 <= a <= tau):
        raise ValidationError(f"rotation {a} outside [0, {tau}]")
    if not (0 <= t <= tau):
        raise ValidationError(f"parameter {t} outside [0, {tau}]")
    fa, f0, ft = evaluate(f, a), f.points[0], f.points[-1]
    if t + a < tau:
        p = evaluate(f, t + a)
        return (p[0] - fa[0] + f0[0], p[1] - fa[1] + f0[1])
    p = evaluate(f, a + t - tau)
    return (ft[0] - fa[0] + p[0], ft[1] - fa[1] + p[1])


def rotate(f: PolygonalCurve2, a) -> PolygonalCurve2:
    a = as_rat(a)
    tau = f.tau
    if not (0 <= a <= tau):
        raise ValidationError(f"rotation {a} outside [0, {tau}]")
    ts = {ZERO, tau, tau - a}
    for k in f.knots:
        if a < k < tau:
            ts.add(k - a)
        if 0 < k < a:
            ts.add(k + tau - a)
    knots = tuple(sorted(ts))
    g = PolygonalCurve2(tuple(rotated_point(f, a, t) for t in knots), knots)
    check(g.points[0] == f.points[0] and g.points[-1] == f.points[-1], "rotation moved an endpoint")
    return g


def base_rotation(f: PolygonalCurve2) -> Fraction:
    """Smallest parameter where the second coordinate is minimal.

    A polygonal minimum sits at a breakpoint. Rotating there keeps the second
    coordinate at least ``min(f_2(0), f_2(tau))`` everywhere, which is the
    nonnegativity statement once the endpoints sit on the x-axis.
    """
    low = min(p[1] for p in f.points)
    i = next(i for i, p in enumerate(f.points) if p[1] == low)
    a1 = f.knots[i]
    g = rotate(f, a1)
    floor_ = min(f.points[0][1], f.points[-1][1])
    check(all(p[1] >= floor_ for p in g.points), "base rotation dips below the endpoints")
    return a1


def _lexmin_on_line(p, v, cons):
    """Lexicographically smallest (alpha, beta) = p + s v subject to cons.

    ``cons`` is a list of (ca, cb, lo, hi) meaning lo <= ca*alpha + cb*beta <= hi.
    """
    lo_s, hi_s = None, None
    for ca, cb, lo, hi in cons:
        base = ca * p[0] + cb * p[1]
        slope = ca * v[0] + cb * v[1]
        if slope == 0:
            if not (lo <= base <= hi):
                return None
            continue
        a, b = (lo - base) / slope, (hi - base) / slope
        if a > b:
            a, b = b, a
        lo_s = a if lo_s is None else max(lo_s, a)
        hi_s = b if hi_s is None else min(hi_s, b)
    if lo_s is None:
        s = ZERO
    else:
        if lo_s > hi_s:
            return None
        if v[0] > 0 or (v[0] == 0 and v[1] > 0):
            s = lo_s
        else:
            s = hi_s
    return (p[0] + s * v[0], p[1] + s * v[1])


def _solve_pair(di, dj, R, span, tau):
    """Lex-min (alpha, beta) in [0,1]^2 with beta*dj - alpha*di = R and
    0 <= span + beta - alpha <= tau."""
    cons = [(ONE, ZERO, ZERO, ONE), (ZERO, ONE, ZERO, ONE), (-ONE, ONE, -span, tau - span)]
    m11, m12, m21, m22 = -di[0], dj[0], -di[1], dj[1]
    det = m11 * m22 - m12 * m21
    if det != 0:
        alpha = (R[0] * m22 - m12 * R[1]) / det
        beta = (m11 * R[1] - m21 * R[0]) / det
        if all(lo <= ca * alpha + cb * beta <= hi for ca, cb, lo, hi in cons):
            return alpha, beta
        return None
    rows = [(m11, m12, R[0]), (m21, m22, R[1])]
    nz = [r for r in rows if r[0] != 0 or r[1] != 0]
    if not nz:
        if R[0] != 0 or R[1] != 0:
            return None
        # whole box is a solution: alpha = 0, then smallest feasible beta
        return _lexmin_on_line((ZERO, ZERO), (ZERO, ONE), cons)
    c1, c2, rhs = nz[0]
    p = (rhs / c1, ZERO) if c1 != 0 else (ZERO, rhs / c2)
    for a, b, r in rows:
        if a * p[0] + b * p[1] != r:
            return None
    return _lexmin_on_line(p, (c2, -c1), cons)


def find_intersection(f: PolygonalCurve2, mu, trace=None) -> tuple:
    """``(a, t)`` with ``f^a(t) == mu f(0) + (1 - mu) f(tau)`` exactly.

    Enumerates the segment of ``a`` and the segment of ``a + t`` on the
    doubled curve, solving a 2x2 system in the two offsets for each pair.
    The first hit in (floor a, floor(a+t), a) order wins.
    """
    mu = as_rat(mu)
    if not (0 <= mu <= 1):
        raise ValidationError(f"mu={mu} outside [0, 1]")
    if not f.unit:
        raise ValidationError("find_intersection expects a unit-parameterized curve")
    pts = f.points
    tau = len(pts) - 1
    f0, ft = pts[0], pts[-1]
    D = ((1 - mu) * (ft[0] - f0[0]), (1 - mu) * (ft[1] - f0[1]))
    seg = [(pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]) for i in range(tau)]
    shift = (ft[0] - f0[0], ft[1] - f0[1])

    def unrolled(j):
        if j <= tau:
            return pts[j]
        p = pts[j - tau]
        return (p[0] + shift[0], p[1] + shift[1])

    target = (mu * f0[0] + (1 - mu) * ft[0], mu * f0[1] + (1 - mu) * ft[1])
    for i in range(tau):
        pi = pts[i]
        for j in range(i, i + tau + 1):
            if j >= 2 * tau:
                break
            Pj = unrolled(j)
            R = (D[0] - Pj[0] + pi[0], D[1] - Pj[1] + pi[1])
            sol = _solve_pair(seg[i], seg[j % tau], R, Fraction(j - i), tau)
            if sol is None:
                continue
            alpha, beta = sol
            a = i + alpha
            t = (j + beta) - a
            got = rotated_point(f, a, t)
            if trace is not None:
                trace({"i": i, "j": j, "a": str(a), "t": str(t)})
            check(got == target, f"solver produced ({a}, {t}) missing the target")
            return a, t
    raise InvariantViolation("no rotation meets the target; existence guarantee broken")
