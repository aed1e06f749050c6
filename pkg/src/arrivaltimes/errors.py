"""Exception types raised by the numerical routines."""


class ArrivalTimeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ArrivalTimeError):
    """Bad physical parameters or malformed scenario input."""


class NumericalDegeneracyError(ArrivalTimeError):
    """A closed-form expression lost all significant digits.

    Raised when the matching determinant underflows, which happens only
    at (or numerically indistinguishable from) the critically damped
    point where the two internal decay branches coincide.
    """


class SingularReweightingError(NumericalDegeneracyError):
    """Flux renormalization requested where no photon is ever emitted.

    With the coupling switched off the emission kernel vanishes
    identically, so dividing by the per-momentum detection probability
    is meaningless.
    """


class WraparoundError(ArrivalTimeError):
    """FFT deconvolution would alias: the sampled density has not
    decayed at the ends of its record."""


class SchemeViolationError(NumericalDegeneracyError):
    """The implicit time stepper broke a structural guarantee.

    The conditional evolution only loses norm, and the discretization
    preserves that exactly up to roundoff; any step that increases the
    norm means the linear solve went numerically wrong.
    """


class OracleMismatchError(ArrivalTimeError):
    """Independent time-domain integration disagrees with the spectral
    result beyond tolerance."""
