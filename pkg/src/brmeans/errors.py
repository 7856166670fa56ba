"""Exception types raised by the library."""


class BRError(ValueError):
    """Base class for all library errors."""


class ResolutionTooSmall(BRError):
    pass


class SymmetryViolation(BRError):
    pass


class SeriesDivergence(BRError):
    pass


class QuadratureNonconvergence(BRError):
    pass


class InsufficientBlocks(BRError):
    pass


class InsufficientPoints(BRError):
    pass


class SamplingMismatch(BRError):
    pass


class EmptyCandidates(BRError):
    pass


class TailToleranceUnreachable(BRError):
    pass


class ConfigError(BRError):
    """Invalid experiment configuration (CLI exit code 2)."""
