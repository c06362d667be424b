"""Exception hierarchy shared by all modules."""


class EikonalError(Exception):
    """Base class for errors raised by this package."""


class SingularQuaternion(EikonalError, ZeroDivisionError):
    pass


class UnsupportedVariant(EikonalError, ValueError):
    pass


class BridgeTimeOverflow(EikonalError, ValueError):
    pass


class KempHallAxis(EikonalError, ValueError):
    """The radial chart (z, r=|w|) is singular on the axis w = 0."""


class NonHermitianSpec(EikonalError, ValueError):
    pass


class BranchAmbiguity(EikonalError, ArithmeticError):
    pass


class NoConvergence(EikonalError, ArithmeticError):
    pass


class StepUnderflow(EikonalError, ValueError):
    pass


class GridTooSmall(EikonalError, ValueError):
    pass


class NegativeDensity(EikonalError, ArithmeticError):
    """A reconstructed density is negative beyond stencil noise."""


class EmptySupport(EikonalError, ValueError):
    pass


class AtomCollision(EikonalError, ZeroDivisionError):
    pass


class DegenerateDensity(EikonalError, ValueError):
    pass


class BadDimension(EikonalError, ValueError):
    pass


class EigFailure(EikonalError, ArithmeticError):
    pass


class DefectiveMatrix(EikonalError, ArithmeticError):
    pass


class ConfigError(EikonalError, ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
