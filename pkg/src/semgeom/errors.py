"""Exception hierarchy shared across the toolkit."""


class SemgeomError(Exception):
    """Base class for all toolkit errors."""


class NonFiniteEntry(SemgeomError):
    pass


class TooFewPoints(SemgeomError):
    pass


class BadMagic(SemgeomError):
    pass


class TruncatedFile(SemgeomError):
    pass


class IoFailure(SemgeomError):
    pass


class KTooLarge(SemgeomError):
    pass


class RangeOutOfBounds(SemgeomError):
    pass


class DegenerateNeighborhood(SemgeomError):
    pass


class AllRatiosUnity(SemgeomError):
    pass


class NeighborhoodTooSmall(SemgeomError):
    pass


class DegenerateTangent(SemgeomError):
    pass


class RankDeficientBasis(SemgeomError):
    pass


class SupportMismatch(SemgeomError):
    pass


class DegenerateDirection(SemgeomError):
    pass


class DimensionMismatch(SemgeomError):
    pass


class EmptyInput(SemgeomError):
    pass


class InsufficientPositivePoints(SemgeomError):
    pass


class LengthMismatch(SemgeomError):
    pass


class ZeroVariance(SemgeomError):
    pass


class BadParameters(SemgeomError):
    pass


class TooFewSamples(SemgeomError):
    pass


class AntipodalPoints(SemgeomError):
    pass


class DisconnectedGraph(SemgeomError):
    def __init__(self, n_components):
        super().__init__(f"graph has {n_components} connected components")
        self.n_components = n_components
