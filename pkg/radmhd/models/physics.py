from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from enum import Enum


class KappaForm(str, Enum):
    BOUNDED_POWER = "bounded_power"  # kappa1 * (1 + theta^q)
    SUM_OVER_RHO = "sum_over_rho"  # kappa1 + kappa2 * theta^q / rho


class PhysParams(BaseModel):
    """Physical constants of the planar radiative MHD system.

    Only the longitudinal viscosity ``lam`` (lambda' + 2 mu) and the shear
    viscosity ``mu`` enter the equations, so lambda' itself is not stored.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    R: float = Field(default=1.0, description="Gas constant")
    C_v: float = Field(default=1.0, description="Heat capacity at constant volume")
    a: float = Field(default=1.0, description="Radiation constant")
    lam: float = Field(default=1.0, alias="lambda", description="Longitudinal viscosity")
    mu: float = Field(default=1.0, description="Shear viscosity")
    nu: float = Field(default=1.0, description="Magnetic diffusivity")
    kappa1: float = Field(default=1.0, description="Conductivity floor coefficient")
    kappa2: float = Field(default=1.0, description="Conductivity ceiling/secondary coefficient")
    q: float = Field(default=1.0, description="Conductivity temperature exponent")
    kappa_form: KappaForm = KappaForm.BOUNDED_POWER

    @field_validator("R", "C_v", "lam", "mu", "nu", "kappa1", "kappa2")
    @classmethod
    def _strictly_positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("must be > 0")
        return value

    @field_validator("a")
    @classmethod
    def _radiation_non_negative(cls, value: float) -> float:
        # a = 0 is the perfect-gas corner used by the inversion tests
        if not value >= 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("q")
    @classmethod
    def _exponent_non_negative(cls, value: float) -> float:
        if not value >= 0:
            raise ValueError("must be >= 0")
        return value

    @model_validator(mode="after")
    def _envelope_ordered(self) -> "PhysParams":
        if self.kappa_form == KappaForm.BOUNDED_POWER and self.kappa2 < self.kappa1:
            raise ValueError("kappa2 must be >= kappa1 when kappa_form is bounded_power")
        return self
