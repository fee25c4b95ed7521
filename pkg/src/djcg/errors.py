"""Exception hierarchy.

``InputError`` covers bad user data (CLI exit code 2), ``NumericalError``
covers failures of the numerics themselves (CLI exit code 3).
"""


class Error(Exception):
    pass


class InputError(Error):
    pass


class NumericalError(Error):
    pass


class PoleAtSpinLevel(InputError):
    """Spectral parameter coincides with a spin level epsilon_j."""


class DegenerateBethe(NumericalError):
    """Two Bethe roots collide; normal forms and strata are undefined."""


class OscillatorZero(NumericalError):
    """bbar ~ 0: separated variables are not defined there."""


class NearDegenerateDivisor(NumericalError):
    """Two divisor points nearly coincide; interpolation is ill-conditioned."""


class NegativeBB(NumericalError):
    """Reconstructed bbar*b is negative: configuration is not physical."""


class DivisionRemainder(NumericalError):
    """Q - P^2 failed to divide by the divisor polynomial within tolerance."""


class SingularSystem(NumericalError):
    """Linear system for the divisor is (numerically) singular at this time."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


class RealityViolation(InputError):
    """Integration constants do not satisfy the reality constraints."""


class NoSolution(NumericalError):
    """No admissible curve for this sign pattern at this grid point."""


class Inconsistent(NumericalError):
    """A degenerate-curve consistency condition is violated."""

    def __init__(self, msg, condition=None):
        super().__init__(msg)
        self.condition = condition


class InvalidM(InputError):
    """Operation not defined for this half-degree parameter m."""


class PoleAtHalfLine(InputError):
    """x = epsilon_1/2 is a pole of the one-spin range formulas."""


class DegenerateAlpha(InputError):
    """Pencil parameter alpha hits the degenerate value 1/(2 epsilon_1)."""


class StepFailure(NumericalError):
    """Adaptive step size underflowed."""


class BadColumns(InputError):
    """Requested CSV columns are missing."""
