"""Exception hierarchy for the toolkit.

Every operation raises a subclass of :class:`ToolkitError`, so callers (and
the CLI) can distinguish domain errors from bugs.
"""


class ToolkitError(Exception):
    """Base class for all domain errors raised by this package."""


class BudgetExceeded(ToolkitError):
    """An enumeration would exceed the configured work budget."""


class EmptySubgame(ToolkitError):
    """A rectangle restriction left no edges to condition on."""


class NotProjection(ToolkitError):
    """Operation requires a projection game (functional constraints)."""


class ZeroDenominator(ToolkitError):
    """The supports of the given distributions touch no edge."""


class NotLeftRegular(ToolkitError):
    """Operation requires all left degrees to be equal."""


class NotBiregular(ToolkitError):
    """Operation requires equal left degrees and equal right degrees."""


class NoConvergence(ToolkitError):
    """Power iteration exceeded its iteration limit."""


class DivisibilityError(ToolkitError):
    """Requested degree sequence does not split evenly across a side."""


class SizeMismatch(ToolkitError):
    """Operation requires both vertex sides to have the same size."""


class EmptySet(ToolkitError):
    """A vertex subset argument was empty."""


class IsolatedVertex(ToolkitError):
    """A vertex with no incident edges cannot induce a distribution."""


class DimensionMismatch(ToolkitError):
    """Graph sides that must be glued together have different sizes."""


class ParameterInfeasible(ToolkitError):
    """Construction parameters admit no valid instance."""


class GadgetUnavailable(ToolkitError):
    """The gadget supplier failed to hit its spectral target after retries."""


class PreconditionFailed(ToolkitError):
    """A stated precondition of a verified bound does not hold."""
