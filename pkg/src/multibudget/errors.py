"""Exception hierarchy. The CLI maps each family to an exit code."""


class MultiBudgetError(Exception):
    exit_code = 1


class ValidationError(MultiBudgetError, ValueError):
    """Malformed input: schema, dimensions, sign, parameter form."""

    exit_code = 1


class DimensionError(ValidationError):
    pass


class InvariantViolation(MultiBudgetError):
    """A proven property failed at runtime. Always a bug."""

    exit_code = 2


class ResourceBoundError(MultiBudgetError):
    """An enumeration or iteration cap was exceeded."""

    exit_code = 3


class InfeasibleLP(MultiBudgetError):
    exit_code = 2


def check(cond, message):
    """Raise :class:`InvariantViolation` unless ``cond`` holds.

    Used instead of ``assert`` so the checks survive ``python -O``.
    """
    if not cond:
        raise InvariantViolation(message)
