class SurveyBanditError(Exception):
    """Base class for errors raised by this package."""


class NumericalSingularityError(SurveyBanditError):
    pass


class ConvergenceError(SurveyBanditError):
    """Coordinate descent hit its sweep limit before converging."""

    def __init__(self, message: str, kkt_residual: float, sweeps: int):
        super().__init__(f"{message} (KKT residual {kkt_residual:.3e} after {sweeps} sweeps)")
        self.kkt_residual = kkt_residual
        self.sweeps = sweeps


class ScheduleError(SurveyBanditError):
    """A regularization/radius schedule was evaluated where it is undefined (n = 0)."""


class IncompleteObservationError(SurveyBanditError):
    """A coordinate needed for a computation was not observed."""


class InvariantViolation(SurveyBanditError):
    """A runtime invariant of the simulation failed."""

    def __init__(self, message: str, step: int | None = None):
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"{message}{where}")
        self.step = step


class ConfigError(SurveyBanditError):
    pass
