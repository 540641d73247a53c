"""Exception hierarchy for stablewalk."""


class StableWalkError(Exception):
    """Base class for all library errors."""


class AlphaOutOfRange(StableWalkError):
    """Stable index must lie strictly inside (1, 2)."""


class InfeasibleMeanAdjustment(StableWalkError):
    """Zero-mean correction would require a negative atom or p(0) <= 0."""


class AperiodicityFailure(StableWalkError):
    """Support of the increment law does not generate the full lattice."""


class QuadratureNonConvergence(StableWalkError):
    """Error estimate above tolerance after maximal refinement."""


class WrongSkew(StableWalkError):
    """Operation requires the spectrally positive case gamma = 2 - alpha."""


class SingularSystem(StableWalkError):
    """Hitting-distribution linear system is numerically singular."""


class ExtrapolationUnstable(StableWalkError):
    """Tail extrapolation did not stabilise across depths."""


class DegenerateDenominator(StableWalkError):
    """a(y) + a(-y) vanished; two-point hitting formula undefined."""


class WindowTooSmall(StableWalkError):
    """Escaped mass exceeded the configured budget for this window."""


class TruncationTooCoarse(StableWalkError):
    """Ladder pmf truncation tail above budget."""


class RegimeViolation(StableWalkError):
    """Grid point does not satisfy the regime constraint of the requested form."""


class InfiniteCPlus(StableWalkError):
    """Operation requires a law with a bounded one-sided potential."""


class ResolutionTooCoarse(StableWalkError):
    """Kernel resolution too coarse for the requested scaled estimate."""


class ConditioningMassZero(StableWalkError):
    """Conditioning event has (numerically) zero probability."""


class ConditioningTooRare(StableWalkError):
    """Too few effective Monte Carlo trials on the conditioning event."""


class ConfigError(StableWalkError):
    """Malformed configuration input."""
