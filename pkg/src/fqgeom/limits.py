import os

TUPLE_BUDGET = 10**9
ENUMERATION_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


def budget(default: int) -> int:
    """The work cap for an exhaustive loop; ``FQGEOM_BUDGET`` overrides it."""
    override = os.environ.get("FQGEOM_BUDGET")
    return int(float(override)) if override else default
