from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multibudget.errors import DimensionError, InvariantViolation, ValidationError
from multibudget.numeric import as_rat, audit, columns_dot, dot, floor_rat, format_rat, parse_rat, rank, rat_cmp

from conftest import rats


@pytest.mark.parametrize(
    "text, value",
    [("3/4", Fraction(3, 4)), ("-6/8", Fraction(-3, 4)), ("5", Fraction(5)), (" 7/1 ", Fraction(7)), ("0/9", Fraction(0))],
)
def test_parse_known_literals(text, value):
    assert parse_rat(text) == value


@pytest.mark.parametrize("q, text", [(Fraction(6, 8), "3/4"), (Fraction(-4, 2), "-2"), (Fraction(0), "0")])
def test_format_is_canonical(q, text):
    assert format_rat(q) == text


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        parse_rat("1/0")


@pytest.mark.parametrize("bad", ["1.5", "a/b", "", "1/2/3", "1/2.0"])
def test_garbage_literals_rejected(bad):
    with pytest.raises(ValidationError):
        parse_rat(bad)


@pytest.mark.parametrize("bad", [0.5, True, None, [1]])
def test_as_rat_refuses_non_rationals(bad):
    with pytest.raises(ValidationError):
        as_rat(bad)


@given(rats())
def test_format_parse_round_trip(q):
    assert parse_rat(format_rat(q)) == q
    assert format_rat(parse_rat(format_rat(q))) == format_rat(q)


@given(rats(), rats())
def test_cmp_matches_order(a, b):
    assert rat_cmp(a, b) == (a > b) - (a < b)


@given(rats(-50, 50, 7))
def test_floor_matches_int_division(q):
    f = floor_rat(q)
    assert f <= q < f + 1


def test_dot_dimension_mismatch():
    with pytest.raises(DimensionError):
        dot((1, 2), (1,))


def test_columns_dot_is_usage():
    lengths = ((Fraction(1), Fraction(2)), (Fraction(3), Fraction(0)), (Fraction(1, 2), Fraction(5)))
    assert columns_dot(lengths, (1, 0, 2)) == (Fraction(2), Fraction(12))


def test_rank_small_matrices():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0, 1], [0, 1, 1], [1, 1, 2]]) == 2
    assert rank([[Fraction(1, 3), 1], [1, 3]]) == 1
    assert rank([]) == 0


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_bounded_and_row_order_free(rows):
    r = rank(rows)
    assert 0 <= r <= min(len(rows), 3)
    assert rank(list(reversed(rows))) == r


def test_audit_flags_floats():
    audit({"a": [Fraction(1, 2), (Fraction(3),)]})
    with pytest.raises(InvariantViolation):
        audit([Fraction(1), 0.5])
