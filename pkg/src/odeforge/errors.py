"""Exception hierarchy shared by all odeforge subsystems."""


class OdeforgeError(Exception):
    """Base class for all library errors."""


# -- prime field / series layer ---------------------------------------------

class FieldMismatch(OdeforgeError):
    """Operands live in different prime fields or use different variables."""


class NonInvertibleLeadingTerm(OdeforgeError):
    """Series reciprocal/composition needs an invertible leading term."""


# -- guessing ----------------------------------------------------------------

class NoAnnihilatorFound(OdeforgeError):
    """No operator kernel at any admissible (order, degree) pair."""


class InsufficientTerms(OdeforgeError):
    """Series too short for the requested fitting budget."""


class NoSolutionFound(OdeforgeError):
    """Inhomogeneous fit produced an empty kernel."""


class DegenerateFit(OdeforgeError):
    """Fit succeeded but the operator part vanished identically."""


class IndicialObstruction(OdeforgeError):
    """Recursion blocked: indicial factor vanished at index n."""

    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"indicial factor vanishes at n={n}")


class SeedTooShort(OdeforgeError):
    """Seed series does not clear the operator degree / indicial roots."""


# -- multi-prime reconstruction ----------------------------------------------

class NoConsistentK(OdeforgeError):
    """No power-of-2 stripping exponent passes the stability test."""


class NoRationalFound(OdeforgeError):
    """Rational reconstruction failed within the half-modulus bound."""


class InsufficientSamples(OdeforgeError):
    """Too few data points for the requested fit."""


# -- operator algebra ----------------------------------------------------------

class SeriesTooShort(OdeforgeError):
    """Series has fewer usable terms than the operation requires."""


class BadReduction(OdeforgeError):
    """Operator degenerates modulo the chosen prime (head vanishes)."""


class ZeroFunction(OdeforgeError):
    """The zero function has no first-order annihilator."""


class PointMismatch(OdeforgeError):
    """Block schemes attached to different singular points."""


# -- local analysis -------------------------------------------------------------

class NotComputable(OdeforgeError):
    """Exact local data requested at a non-rational center."""


class DepthBudgetExceeded(OdeforgeError):
    """Logarithm depth grew past the configured budget."""


class NoSplitRoot(OdeforgeError):
    """Head factor has no simple root modulo the chosen prime."""


class NoAnnihilator(OdeforgeError):
    """No low-order annihilator exists for the probed local solution."""


# -- high-precision continuation -------------------------------------------------

class PrecisionFloor(OdeforgeError):
    """Comparison requested below the tracked precision of the operands."""


class IllConditioned(OdeforgeError):
    """Connection solve lost too many digits; carries the achieved count."""

    def __init__(self, achieved_digits, requested_digits, message=None):
        self.achieved_digits = achieved_digits
        self.requested_digits = requested_digits
        super().__init__(
            message
            or f"achieved {achieved_digits:.1f} digits < requested {requested_digits}"
        )


class DiskMismatch(OdeforgeError):
    """Matching midpoint falls outside one of the convergence disks."""


class TooFewTerms(OdeforgeError):
    """Ratio-test window needs more coefficients."""


class NoStableRational(OdeforgeError):
    """No continued-fraction convergent stabilizes across the sequence."""


class FrameOutOfRange(OdeforgeError):
    """Branch-continuation formulas do not apply at this expansion point."""


class ModelMismatch(OdeforgeError):
    """Amplitude-fit residuals do not decay under the supplied model."""


class NoRoot(OdeforgeError):
    """Bracketed root search found no sign change."""


class BadMap(OdeforgeError):
    """Variable substitution must fix the origin with nonzero slope."""
