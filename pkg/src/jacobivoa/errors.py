"""Exception and warning types raised across the package."""


class JacobiVOAError(Exception):
    """Base class for every error raised by jacobivoa."""


class PreconditionError(JacobiVOAError, ValueError):
    """An input violates the documented precondition of an operation."""


class NonInvertible(PreconditionError):
    pass


class BadWeight(PreconditionError):
    pass


class WeightMismatch(PreconditionError):
    pass


class NotPolynomialInX(PreconditionError):
    """The q^0 layer is not symmetric under zeta -> 1/zeta."""


class HypothesisViolated(PreconditionError):
    pass


class IntegralityViolation(PreconditionError):
    pass


class InfiniteOrder(PreconditionError):
    pass


class InvalidLattice(PreconditionError):
    pass


class PrecisionLoss(JacobiVOAError):
    """A numeric evaluation's tail estimate exceeds the requested tolerance."""


class VerificationError(JacobiVOAError):
    """A functional-equation check could not produce a trustworthy verdict.

    The partially filled report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnstableFit(VerificationError):
    pass


class PermutationMismatch(VerificationError):
    pass


class PrecisionLossWarning(UserWarning):
    pass
