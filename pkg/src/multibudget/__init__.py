"""Approximation schemes for combinatorial optimization with several budgets.

Everything is computed over exact rationals (:class:`fractions.Fraction`).
"""

from multibudget.numeric import Rat, parse_rat, format_rat

__all__ = ["Rat", "parse_rat", "format_rat"]
__version__ = "0.1.0"
