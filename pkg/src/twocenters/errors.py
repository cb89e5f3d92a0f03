"""Exception and warning types raised across the package."""


class TwoCentersError(Exception):
    """Base class for computation errors; the CLI maps these to exit status 1."""


class CenterCollision(TwoCentersError):
    pass


class RegimeUnsupported(TwoCentersError):
    pass


class RootBracketFailure(TwoCentersError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class GridTooCoarse(TwoCentersError):
    pass


class CollisionFiber(TwoCentersError):
    pass


class ChartSingular(TwoCentersError):
    pass


class NoTurningPoint(TwoCentersError):
    pass


class WindowViolation(TwoCentersError):
    pass


class QuadratureStall(TwoCentersError):
    pass


class RadicandNonpositive(TwoCentersError):
    pass


class EnergyNonnegative(TwoCentersError):
    pass


class LevelInadmissible(TwoCentersError):
    pass


class NoCrossing(TwoCentersError):
    pass


class ProfileTooSparse(TwoCentersError):
    pass


class NonMonotoneAbscissa(TwoCentersError):
    pass


class ConditionWarning(UserWarning):
    """Energy outside the range where the toric picture is guaranteed."""
