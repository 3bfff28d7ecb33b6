"""Exception hierarchy shared by every module."""


class ComplementarityError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(ComplementarityError, ValueError):
    """An input violates an operation's precondition."""


class DegenerateProjectionError(ComplementarityError):
    """A projection has (numerically) zero probability."""


class DegenerateComplementError(ComplementarityError):
    """The detector overlap is ~1, so no orthogonal complement state exists."""


class DegeneratePathError(ComplementarityError):
    """One interferometer path carries no population."""


class EmbeddingError(ComplementarityError):
    """The joint state leaks outside the two-dimensional detector span."""


class FitError(ComplementarityError):
    """The fringe fit is rank-deficient or the theta grid is degenerate."""


class ConfigurationError(ComplementarityError):
    """Invalid device/scenario configuration or numerical set-up."""


class ConsistencyError(ComplementarityError):
    """A numerical invariant was breached beyond round-off."""
