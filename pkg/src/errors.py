"""Exception hierarchy shared by every module of the verifier."""


class DerivationToolkitError(Exception):
    """Base class for all errors raised by the verifier."""


class ScalarDomainError(DerivationToolkitError):
    """Invalid scalar domain, or scalars from two different domains."""


class ZeroDivisionScalarError(DerivationToolkitError, ZeroDivisionError):
    """Division by the zero scalar."""


class AlgebraError(DerivationToolkitError):
    """Invalid algebra spec, failed structure audit or mismatched elements."""


class LayoutError(DerivationToolkitError):
    """Packed vectors or solution spaces that do not share a layout."""


class BudgetExceededError(DerivationToolkitError):
    """Input too large for the dense oracle."""


class PreconditionError(DerivationToolkitError):
    """An operation was called outside its precondition."""


class UsageError(DerivationToolkitError):
    """Command-line misuse (exit code 2)."""
