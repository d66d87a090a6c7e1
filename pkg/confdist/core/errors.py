"""
Exception hierarchy shared by the engines, services and CLI.
"""


class ConfDistError(Exception):
    """Base class for every error raised by this package."""


class SemiringMismatchError(ConfDistError, ValueError):
    """A value does not belong to the semiring it is used with."""


class IllFormedConfigurationError(ConfDistError, ValueError):
    """A configuration violates the node-kind or stack chain condition."""


class AutomatonShapeError(ConfDistError, ValueError):
    """An automaton or RSM does not satisfy a saturation precondition."""


class DocumentError(ConfDistError, ValueError):
    """A JSON document could not be parsed into a model."""


class NonTerminationError(ConfDistError, RuntimeError):
    """A transition was relaxed more often than the configured cap allows."""


class BudgetExceededError(ConfDistError, RuntimeError):
    """Block precomputation would exceed its sequence budget."""


class InconclusiveError(ConfDistError, RuntimeError):
    """The stack-bounded oracle did not stabilize below its ceiling."""


class ContextBoundError(ConfDistError, ValueError):
    """Context bound k must be positive."""
