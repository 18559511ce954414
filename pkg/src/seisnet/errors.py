"""Exception types shared across the package."""


class SeisnetError(ValueError):
    """Base class for all domain errors raised by seisnet."""


class InvalidFrameError(SeisnetError):
    pass


class UnsatisfiableSplitError(SeisnetError):
    pass


class InvalidRateError(SeisnetError):
    pass


class WrongStreamKindError(SeisnetError):
    pass


class ParameterMismatchError(SeisnetError):
    pass
