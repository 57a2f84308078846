"""Exception hierarchy shared by every solver module."""


class OutcomeRangeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(OutcomeRangeError, ValueError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotContained(InputError):
    """A scenario lies outside its reference interval vector."""


class TooManyVertices(InputError):
    pass


class EmptyPerturbationSet(InputError):
    pass


class SolverError(OutcomeRangeError):
    """Raised when a numerical method cannot produce a result."""


class NumericalFailure(SolverError):
    pass


class SingularBasis(SolverError):
    pass


class InfeasibleOmegaB(SolverError):
    """The polyhedron describing the optimal set is empty."""


class DualBoxUnbounded(SolverError):
    pass


class DualInfeasible(SolverError):
    pass


class SupersetUnavailable(SolverError):
    pass


class InitialInfeasible(SolverError):
    pass


class AllSamplesInfeasible(SolverError):
    pass


class RejectionBudgetExhausted(SolverError):
    pass


class ZeroReference(OutcomeRangeError, ZeroDivisionError):
    pass
