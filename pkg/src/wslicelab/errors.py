"""Exception types shared across the package."""


class WsliceError(Exception):
    """Base class for every error raised by the package."""


class DomainInvalid(WsliceError):
    pass


class SpecInvalid(WsliceError):
    pass


class PointOutsideDomain(WsliceError):
    pass


class NoSuchCorridor(WsliceError):
    pass


class NoSuchDecoration(WsliceError):
    pass


class EmptyGrid(WsliceError):
    pass


class ResolutionTooCoarse(WsliceError):
    pass


class PathExitsDomain(WsliceError):
    pass


class Disconnected(WsliceError):
    pass


class SnapFailed(WsliceError):
    pass


class EndpointInsideSlice(WsliceError):
    pass


class PointsNotInDecoration(WsliceError):
    pass


class TooCloseToBoundary(WsliceError):
    pass


class GridDoesNotCoverDataset(WsliceError):
    pass


class AlphaNotZero(WsliceError):
    pass


class WrongFamily(WsliceError):
    pass
