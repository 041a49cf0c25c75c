"""Exception types raised by the analysis and simulation routines."""


class FocusBifError(Exception):
    """Base class for all package errors."""


class ZeroGradient(FocusBifError):
    """The switching function has a (numerically) vanishing spatial gradient."""


class DegenerateData(FocusBifError):
    """A closed-form formula hits a zero denominator."""


class SingularJacobian(DegenerateData):
    """Newton iteration met a Jacobian with |det| below threshold."""


class NewtonDiverged(FocusBifError):
    """Newton iteration did not reach the residual tolerance."""


class NotOnSurface(FocusBifError):
    pass


class NotSliding(FocusBifError):
    """No Filippov convex combination (or outward normal push) exists at the point."""


class StepFailure(FocusBifError):
    """Adaptive integrator step size underflowed."""


class ChatterDetected(FocusBifError):
    pass


class ProjectionDiverged(FocusBifError):
    pass


class NoReturn(FocusBifError):
    """Trajectory did not come back to the switching line within the horizon."""


class WrongImpactCount(FocusBifError):
    pass


class NoSolution(FocusBifError):
    pass


class DomainError(FocusBifError, ValueError):
    pass


class ConfirmationFailed(FocusBifError):
    pass


class ParseError(FocusBifError):
    """Config text failed to parse or validate.

    ``errors`` is a list of ``(line, message)`` pairs; ``line`` is 1-based
    or ``None`` when the location is unknown.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        text = "; ".join(
            f"line {ln}: {msg}" if ln is not None else msg for ln, msg in self.errors
        )
        super().__init__(text)
