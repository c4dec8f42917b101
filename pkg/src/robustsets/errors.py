"""Exception hierarchy shared by all solver modules."""


class RobustSetsError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(RobustSetsError):
    """Invalid input data, parameters, or an unsupported model combination."""


class SizeLimitError(ModelError):
    """Instance too large for an exhaustive desk-scale routine."""


class InvalidStrategyError(ModelError):
    """A mixed strategy violates feasibility (support not independent, bad probabilities)."""


class UnsupportedOperationError(ModelError):
    """Operation not defined for this system or objective kind."""


class PositivityError(ModelError):
    """An objective has maximum value zero over the feasible sets."""


class DecompositionError(ModelError):
    """Point lies outside the feasible polytope; carries a separating cut."""

    def __init__(self, message: str, cut=None):
        super().__init__(message)
        self.cut = cut


class SolverFailure(RobustSetsError):
    """Numerical solver gave up (pivot cap, cut cap, or internal inconsistency)."""
