"""Exception types and the shared enumeration budget."""

import os

DEFAULT_BUDGET = 10**7


class LatcountError(Exception):
    """Base class for errors raised by latcount."""


class BudgetExceeded(LatcountError):
    """An exhaustive enumeration would exceed the configured budget."""


class SingularMatrixError(LatcountError, ValueError):
    pass


class DirectionError(LatcountError):
    """No admissible direction vector was found for the tangent cones."""


def budget(default=DEFAULT_BUDGET):
    """Enumeration budget, overridable with the ``LATCOUNT_BUDGET`` env var."""
    raw = os.environ.get("LATCOUNT_BUDGET")
    if raw is None or raw.strip() == "":
        return default
    return int(float(raw))
