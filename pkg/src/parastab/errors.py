"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: SchemaError -> 1, BudgetError -> 2,
PreconditionError (and subclasses) -> 3.
"""


class ParastabError(Exception):
    pass


class DimensionError(ParastabError):
    """Operand shapes or ambient dimensions do not match."""


class FieldMismatchError(ParastabError):
    """Operands live over different coefficient fields."""


class FieldReductionError(ParastabError):
    """A rational cannot be reduced into F_p (denominator divisible by p)."""


class BudgetError(ParastabError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, needed, budget):
        super().__init__(f"enumeration needs {needed} visits, budget is {budget}")
        self.needed = needed
        self.budget = budget


class PreconditionError(ParastabError):
    """An operation was invoked outside its stated preconditions."""


class IncompleteEnumerationError(PreconditionError):
    """A complete invariant-subspace enumeration is required but unavailable."""


class NotFineError(PreconditionError):
    """Certificate requested for numerical data whose gcd is not 1."""

    def __init__(self, gcd_value):
        super().__init__(f"gcd of degree and flag jumps is {gcd_value}, not 1")
        self.gcd_value = gcd_value


class SchemaError(ParastabError):
    """A job document failed validation; `pointer` locates the offending field."""

    def __init__(self, pointer, message):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
        self.detail = message
