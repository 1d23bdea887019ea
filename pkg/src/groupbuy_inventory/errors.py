"""Exception hierarchy for the replenishment toolkit.

Every error raised by this package derives from GroupBuyError, so callers
can catch one base class. The leaf classes additionally subclass the
closest builtin (ValueError or ArithmeticError) so that generic handlers
keep working.
"""


class GroupBuyError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GroupBuyError, ValueError):
    """An argument value violates an operation's contract."""


class DomainError(GroupBuyError, ValueError):
    """A numeric input lies outside the mathematical domain of an operation."""


class NumericsError(GroupBuyError, ArithmeticError):
    """A numeric routine could not produce a trustworthy result."""


class DegenerateAuctionError(NumericsError):
    """The auction success probability underflowed to an unusable value.

    Raised when p_success drops below 1e-300, at which point expected
    failure counts and dispatch times overflow double precision and every
    downstream quantity is meaningless.
    """


class ConfigError(GroupBuyError, ValueError):
    """A run configuration (CLI flags or config file) failed validation."""
