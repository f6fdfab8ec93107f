"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A configuration value is outside its valid range or inconsistent."""


class IntegratorFault(RuntimeError):
    """A trajectory produced a non-finite state.

    Carries the step index at which the fault was detected and, when the
    trajectory ran inside an ensemble, the trajectory index.
    """

    def __init__(self, step_index, trajectory_index=None):
        self.step_index = step_index
        self.trajectory_index = trajectory_index
        where = f"step {step_index}"
        if trajectory_index is not None:
            where = f"trajectory {trajectory_index}, {where}"
        super().__init__(f"non-finite state at {where}")


class AnalysisError(RuntimeError):
    """A fit or derived observable could not be computed from the data."""
