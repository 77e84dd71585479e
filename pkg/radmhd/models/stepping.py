from pydantic import BaseModel, ConfigDict, Field, model_validator
from enum import Enum


class StepMode(str, Enum):
    EXPLICIT_RK2 = "explicit_rk2"
    IMEX = "imex"


class StepControl(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: StepMode = StepMode.EXPLICIT_RK2
    cfl: float = Field(default=0.4, gt=0.0, le=1.0, description="Safety factor")
    dt_max: float = Field(default=1e-2, gt=0.0, description="Absolute cap on dt")
    dt_min: float = Field(default=1e-12, gt=0.0, description="Abort threshold")
    picard_sweeps: int = Field(default=1, ge=1, le=2, description="IMEX coefficient sweeps")

    @model_validator(mode="after")
    def _dt_window(self) -> "StepControl":
        if not self.dt_min < self.dt_max:
            raise ValueError("dt_min must be < dt_max")
        return self
