"""Exception and warning types raised across the package."""


class EntangleBoundaryError(Exception):
    pass


class NotHermitian(EntangleBoundaryError, ValueError):
    pass


class NotSymmetric(EntangleBoundaryError, ValueError):
    pass


class ConvergenceFailure(EntangleBoundaryError, RuntimeError):
    pass


class DegenerateBlockFailure(EntangleBoundaryError, RuntimeError):
    pass


class NonPositiveInput(EntangleBoundaryError, ValueError):
    pass


class NotPositive(EntangleBoundaryError, ValueError):
    """A matrix that must be positive (semi)definite is not.

    ``eigenvalue`` carries the offending (smallest) eigenvalue.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class InvalidState(EntangleBoundaryError, ValueError):
    pass


class SupportViolation(EntangleBoundaryError, ValueError):
    """support(rho) is not contained in support(sigma); the relative entropy is infinite."""


class RankDeficient(EntangleBoundaryError, ValueError):
    pass


class RankDeficientSigma(RankDeficient):
    pass


class TildeOrthonormalityFailure(EntangleBoundaryError, RuntimeError):
    pass


class SimplexViolation(EntangleBoundaryError, ValueError):
    pass


class SingularFilter(EntangleBoundaryError, ValueError):
    pass


class BoundaryViolation(EntangleBoundaryError, ValueError):
    pass


class SupportCollapse(EntangleBoundaryError, RuntimeError):
    pass


class StateFileError(EntangleBoundaryError, ValueError):
    pass


class IterationLimit(RuntimeWarning):
    """The oracle stopped at its iteration cap before reaching the gap tolerance."""
