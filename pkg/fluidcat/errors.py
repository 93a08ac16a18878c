from __future__ import annotations


class FluidcatError(ValueError):
    """Bad input: the CLI reports it and exits with code 2."""


class MalformedDocumentError(FluidcatError):
    pass


class AsymmetricMetricError(FluidcatError):
    pass


class NegativeDistanceError(FluidcatError):
    pass


class NonzeroDiagonalError(FluidcatError):
    pass


class UnknownAtomError(FluidcatError):
    pass


class NonpositiveEpsilonError(FluidcatError):
    pass


class UnknownObjectError(FluidcatError):
    pass


class FunctorLawViolationError(FluidcatError):
    pass


class ZeroLevelError(FluidcatError):
    pass


class LevelExceededError(FluidcatError):
    pass


class UnlabeledAtomError(FluidcatError):
    pass


class LambdaOutOfRangeError(FluidcatError):
    pass


class BaseMismatchError(FluidcatError):
    pass


class NonComposablePathError(FluidcatError):
    pass


class InvalidTowerError(FluidcatError):
    pass


class RepresentativeMismatchError(FluidcatError):
    pass


class LawViolationError(RuntimeError):
    """A construction broke one of its own laws (CLI exit code 3)."""


class UnsupportedFormatError(FluidcatError):
    pass
