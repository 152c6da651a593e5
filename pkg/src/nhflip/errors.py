"""Exception hierarchy.

Validation problems (bad input) and numerical failures are kept apart so the
command line can map them to distinct exit codes.
"""


class NHFlipError(Exception):
    """Base class for all package errors."""


class ValidationError(NHFlipError, ValueError):
    """The problem instance or run parameters are inconsistent."""


class EmbeddingViolation(ValidationError):
    """A discrete frequency lies outside the open band |omega| < 2 kappa."""


class DuplicateSite(ValidationError):
    """Two discrete states attach to the same lattice site."""


class NonPositiveHopping(ValidationError):
    """Lattice hopping kappa <= 0, or no discrete state is coupled at all."""


class ScheduleMisaligned(ValidationError):
    """A schedule segment (or t_max) is not an integer number of steps."""


class StepTooLarge(ValidationError):
    """Time step exceeds the accuracy guard of the RK4 integrator."""


class TimeBeyondSchedule(ValidationError):
    """Time requested past the end of a non-repeating schedule."""


class BandEdgeSingularity(ValidationError):
    """A frequency sits on (or too close to) the edge of the continuum band."""


class ZeroInitialState(ValidationError):
    """Fidelity is undefined for an empty initial excitation."""


class TrajectoryTooShort(ValidationError):
    """The trajectory does not cover the requested time window."""


class UnknownPreset(ValidationError):
    pass


class ParseError(ValidationError):
    """Config file could not be parsed; message carries line or field info."""


class NumericalError(NHFlipError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class QuadratureNonConvergence(NumericalError):
    pass


class ExtrapolationUnstable(NumericalError):
    pass


class QRNonConvergence(NumericalError):
    pass
