"""Exception types raised across the package.

All of them derive from ``ValueError`` so callers that only care about
"bad input" can catch that.
"""


class SchlichtError(ValueError):
    pass


class DivisorVanishes(SchlichtError):
    pass


class InnerNotVanishing(SchlichtError):
    pass


class NotNormalized(SchlichtError):
    pass


class NonFiniteCoefficients(SchlichtError):
    pass


class InvalidMeasure(SchlichtError):
    pass


class BadConstantTerm(SchlichtError):
    pass


class RadiusOutOfRange(SchlichtError):
    pass


class ParamOutOfRange(SchlichtError):
    pass


class ExcludedAlpha(SchlichtError):
    pass


class DegenerateConvolution(SchlichtError):
    pass


class DegenerateDenominator(SchlichtError):
    pass


class KernelCoefficientZero(SchlichtError):
    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"kernel coefficient k_{index} vanishes")


# bounds-side name for the same condition
ZeroKernelCoefficient = KernelCoefficientZero


class HypothesisViolated(SchlichtError):
    pass
