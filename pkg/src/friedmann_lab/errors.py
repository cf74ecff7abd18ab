"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class FriedmannError(Exception):
    exit_code = 1


class InvalidParameter(FriedmannError, ValueError):
    exit_code = 2


class RadiationNotSupported(FriedmannError, ValueError):
    """Cubic analysis only covers the matter-only equation (delta == 0)."""

    exit_code = 2


class DegenerateDiscriminant(FriedmannError):
    """|D| fell below the degeneracy tolerance (the branching case).

    The discriminant and cubic coefficients are kept on the instance so
    callers can still report them.
    """

    exit_code = 3

    def __init__(self, D: float, p: float, q: float, tol: float):
        super().__init__(f"degenerate discriminant D={D!r} (|D| <= {tol!r})")
        self.D = D
        self.p = p
        self.q = q
        self.tol = tol


class WrongRegime(FriedmannError):
    exit_code = 4


class ForbiddenStart(FriedmannError):
    exit_code = 5


class StepFailure(FriedmannError):
    """The integrator could not meet its tolerance.

    ``last_state`` is ``(t, R, Rdot)`` of the last accepted step.
    """

    exit_code = 6

    def __init__(self, message: str, last_state: tuple[float, float, float]):
        super().__init__(message)
        self.last_state = last_state


class SingularityFloor(FriedmannError):
    """R dropped below the configured floor; the partial trajectory is attached."""

    exit_code = 6

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NoExtremumInSpan(FriedmannError):
    exit_code = 6
