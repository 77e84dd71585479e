from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Optional

from ..core.config import settings
from .diagnostics import AuditTolerances
from .physics import PhysParams
from .profiles import InitialProfile
from .state import InterfaceMean
from .stepping import StepControl


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridSection(_Section):
    n_cells: int = Field(default=256, ge=4, description="Number of mass cells")
    conductivity_mean: InterfaceMean = InterfaceMean.ARITHMETIC


class TimeSection(_Section):
    t_end: float = Field(..., gt=0.0, description="Final simulated time")
    sample_interval: float = Field(default=0.01, gt=0.0, description="Spacing of timeseries rows")


class OutputSection(_Section):
    directory: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    write_snapshots: bool = False
    snapshot_interval: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _snapshot_cadence(self) -> "OutputSection":
        if self.write_snapshots and self.snapshot_interval is None:
            raise ValueError("snapshot_interval is required when write_snapshots is true")
        return self


class RunConfig(_Section):
    """One experiment: physics, discretization, initial data and output policy."""

    physics: PhysParams = Field(default_factory=PhysParams)
    grid: GridSection = Field(default_factory=GridSection)
    stepper: StepControl = Field(default_factory=StepControl)
    init: InitialProfile
    time: TimeSection
    output: OutputSection = Field(default_factory=OutputSection)
    audit: AuditTolerances = Field(default_factory=AuditTolerances)
