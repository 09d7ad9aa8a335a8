"""Exact rational scalars, vectors and matrices.

``Rat`` is :class:`fractions.Fraction`: arbitrary-precision numerator and
positive denominator, always in lowest terms, sign carried by the numerator.
Vectors are tuples of ``Rat`` and matrices are tuples of such rows.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from multibudget.errors import DimensionError, InvariantViolation, ValidationError

Rat = Fraction
RatVec = tuple  # tuple[Rat, ...]
RatMatrix = tuple  # tuple[RatVec, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to ``Rat``. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise ValidationError(f"not a rational: {value!r}")


def parse_rat(text: str) -> Fraction:
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValidationError(f"bad rational literal {text!r}") from None
    if sep and "." in den:
        raise ValidationError(f"bad rational literal {text!r}")
    if d == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(n, d)


def format_rat(q: Fraction) -> str:
    """Canonical text form: ``"num/den"``, or ``"num"`` when den == 1."""
    q = as_rat(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rat_cmp(a, b) -> int:
    a, b = as_rat(a), as_rat(b)
    return (a > b) - (a < b)


def vec(values: Iterable) -> tuple:
    return tuple(as_rat(v) for v in values)


def zeros(n: int) -> tuple:
    return (ZERO,) * n


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise DimensionError(f"length mismatch {len(a)} != {len(b)}")
    total = ZERO
    for x, y in zip(a, b):
        if x and y:
            total += x * y
    return total


def vec_add(a: Sequence, b: Sequence) -> tuple:
    if len(a) != len(b):
        raise DimensionError(f"length mismatch {len(a)} != {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Sequence, b: Sequence) -> tuple:
    if len(a) != len(b):
        raise DimensionError(f"length mismatch {len(a)} != {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def mat_vec(rows: Sequence[Sequence], x: Sequence) -> tuple:
    """Row-major product: entry i is ``rows[i] . x``."""
    return tuple(dot(r, x) for r in rows)


def columns_dot(matrix: Sequence[Sequence], x: Sequence) -> tuple:
    """``matrix^T x`` for an m-by-k matrix stored by rows (one row per element).

    This is how length vectors are stored: ``lengths[e][i]`` is the i-th length
    of element e, so the budget usage of x is ``columns_dot(lengths, x)``.
    """
    if len(matrix) != len(x):
        raise DimensionError(f"length mismatch {len(matrix)} != {len(x)}")
    if not matrix:
        return ()
    k = len(matrix[0])
    out = [ZERO] * k
    for row, xe in zip(matrix, x):
        if xe:
            for i in range(k):
                if row[i]:
                    out[i] += row[i] * xe
    return tuple(out)


def is_integral(q: Fraction) -> bool:
    return q.denominator == 1


def floor_rat(q: Fraction) -> int:
    return q.numerator // q.denominator


def rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    work = [[as_rat(v) for v in r] for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        p = work[r][c]
        for i in range(r + 1, len(work)):
            f = work[i][c]
            if f:
                f = f / p
                row_i, row_r = work[i], work[r]
                for j in range(c, ncols):
                    if row_r[j]:
                        row_i[j] -= f * row_r[j]
        r += 1
        if r == len(work):
            break
    return r


def audit(obj) -> None:
    """Walk nested tuples/lists/dicts and check every Rat is normalized.

    Fraction normalizes on construction, so this only ever fires if someone
    smuggles in a float or an unreduced hand-built value.
    """
    if isinstance(obj, Fraction):
        from math import gcd

        if obj.denominator <= 0 or gcd(abs(obj.numerator), obj.denominator) != 1:
            raise InvariantViolation(f"unnormalized rational {obj!r}")
    elif isinstance(obj, float):
        raise InvariantViolation(f"float leaked into exact data: {obj!r}")
    elif isinstance(obj, dict):
        for v in obj.values():
            audit(v)
    elif isinstance(obj, (list, tuple, set, frozenset)):
        for v in obj:
            audit(v)
