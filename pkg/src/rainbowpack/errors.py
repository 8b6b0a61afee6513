"""Exception hierarchy shared across the package."""


class RainbowError(Exception):
    """Base class for all package errors."""


class ValidationError(RainbowError):
    """A constructed object violates one of its declared invariants."""


class InputError(RainbowError):
    """Caller passed arguments outside an operation's domain."""


class PreconditionError(RainbowError):
    """An operation was invoked with its stated precondition unmet."""


class OracleInconsistencyError(RainbowError):
    """The independence oracle contradicted a matroid axiom.

    Never expected for the built-in families; raised so a broken oracle
    surfaces loudly instead of corrupting a search.
    """


class BudgetExceededError(RainbowError):
    """An exhaustive computation hit its configured budget."""


class GirthTooExpensiveError(RainbowError):
    """Girth requested on a matroid with no closed form above the search cap."""


class LevelBoundViolatedError(RainbowError):
    """The layered recolouring graph ended without a terminal vertex."""


class CorruptedTraceError(RainbowError):
    """Replaying a recorded trace or move log diverged from its records."""


class InternalInvariantError(RainbowError):
    """A should-be-impossible state was reached; indicates a bug."""
