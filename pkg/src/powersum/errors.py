"""Exception hierarchy for the powersum package.

Exit-code mapping used by the CLI:

* usage / argument-validation problems      -> exit code 2 (``ValueError`` or argparse)
* resource and precision failures           -> exit code 3
* verification / invariant failures         -> exit code 1
"""


class PowersumError(Exception):
    """Base class for all powersum-specific errors."""


class ResourceLimitError(PowersumError):
    """A computation would exceed the configured memory budget."""


class PrecisionError(PowersumError):
    """The configured working precision cannot resolve a required quantity.

    Raised e.g. when an oscillatory phase cannot be reduced modulo 1 with
    absolute error at most 1e-6 at the requested precision.
    """


class QuadratureError(PowersumError):
    """Numerical quadrature failed to converge to the required tolerance.

    Carries the achieved error estimate in ``achieved_error`` when available.
    """

    def __init__(self, message: str, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error


class EnvelopeViolationError(PowersumError):
    """A sampled second derivative left its proven envelope.

    The curvature of the oscillation phase is provably pinched between
    ``mu`` and ``eta * mu`` on every dyadic block; leaving that band signals
    an implementation bug, not a mathematical failure.
    """


class DegenerateFitError(PowersumError):
    """A log-log exponent fit was requested on degenerate data.

    Raised when fewer than four points are supplied, when all abscissae
    coincide, or when any supremum is non-positive.
    """


class OracleMismatchError(PowersumError):
    """Two independent exact algorithms disagreed on a value.

    Exact counts are computed by several independent routes that must agree
    bit-for-bit; any mismatch means a bug and is raised loudly.
    """
