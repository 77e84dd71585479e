from typing import List, Optional

from pydantic import BaseModel


class ConfigIssue(BaseModel):
    path: str
    reason: str

    def __str__(self) -> str:
        return f"{self.path}: {self.reason}"


class RadMhdError(Exception):
    """Base class for every error raised by the simulator."""


class DomainError(RadMhdError, ValueError):
    """A physics formula was evaluated outside its domain (v <= 0, theta < 0, e < 0)."""


class ConfigError(RadMhdError):
    def __init__(self, issues: List[ConfigIssue]):
        self.issues = issues
        super().__init__("; ".join(str(issue) for issue in issues))


class MmsSelfCheckError(RadMhdError):
    """A hard-coded manufactured-solution derivative disagrees with finite differences."""


class ConvergenceLevelsError(RadMhdError, ValueError):
    """Grid levels of a convergence study do not ascend by integer factors."""


class SimulationError(RadMhdError):
    """A run cannot continue. Carries the simulation time of the failure when known."""

    def __init__(self, message: str, t: Optional[float] = None):
        self.message = message
        self.t = t
        super().__init__(self._render())

    def _render(self) -> str:
        if self.t is None:
            return self.message
        return f"{self.message} (t={self.t:.17g})"

    def at_time(self, t: float) -> "SimulationError":
        if self.t is None:
            self.t = t
            self.args = (self._render(),)
        return self


class PositivityError(SimulationError):
    def __init__(self, field: str, index: int, value: float, t: Optional[float] = None):
        self.field = field
        self.index = index
        self.value = value
        super().__init__(f"{field}[{index}] = {value!r} is not positive", t)


class TemperatureInversionError(SimulationError):
    pass


class TimeStepCollapseError(SimulationError):
    pass


class SolverCorruptionError(SimulationError):
    pass
