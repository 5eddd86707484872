"""Exceptions raised when a simulation cannot complete.

Bad arguments raise :class:`ValueError`; the classes here cover runtime
failures of an otherwise valid run.
"""


class SimulationError(RuntimeError):
    """Base class for runtime simulation failures."""


class DivergenceError(SimulationError):
    """The integrated state became non-finite."""

    def __init__(self, t: float):
        super().__init__(f"state diverged at t={t:g}")
        self.t = t


class RunawayError(SimulationError):
    """A retry loop exceeded its attempt cap."""


class NonEscapeError(SimulationError):
    """A trajectory used all its steps without leaving the interaction region."""

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class SingularityError(SimulationError):
    """A trajectory came too close to a force center."""


class InvalidMatrixError(ValueError):
    """A channel or source matrix is not stochastic."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row
