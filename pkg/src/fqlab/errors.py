"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, BudgetError -> 3,
InvariantError -> 4.
"""


class FqError(Exception):
    """Base class for all fqlab errors."""


class ConfigError(FqError):
    """Invalid user-supplied configuration or input data."""


class FieldMismatchError(ConfigError):
    """Operation between elements of different fields."""


class BudgetError(FqError):
    """A search space or candidate budget cap was exceeded."""


class InvariantError(FqError):
    """An internal cross-check that must hold mathematically failed."""
