from typing import List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Annotated


class _Profile(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class UniformProfile(_Profile):
    kind: Literal["uniform"] = "uniform"
    v: float = Field(default=1.0, description="Specific volume")
    theta: float = Field(default=1.0, description="Temperature")


class ThermalBumpProfile(_Profile):
    """theta(y) = theta0 + amp * cos(pi y) at cell centers."""

    kind: Literal["thermal_bump"] = "thermal_bump"
    theta0: float = 1.0
    amp: float = 0.5


class VelocityPushProfile(_Profile):
    """u(y) = u_amp * sin(pi y) and w2(y) = w_amp * sin(pi y) at nodes."""

    kind: Literal["velocity_push"] = "velocity_push"
    u_amp: float = 0.1
    w_amp: float = 0.0


class MagnetoPulseProfile(_Profile):
    """b2(y) = b_amp * sin(pi y) at cell centers, b3 = 0."""

    kind: Literal["magneto_pulse"] = "magneto_pulse"
    b_amp: float = 0.3


SimpleProfile = Annotated[
    Union[UniformProfile, ThermalBumpProfile, VelocityPushProfile, MagnetoPulseProfile],
    Field(discriminator="kind"),
]


class CompositeProfile(_Profile):
    """Superposition on a background state.

    A uniform component sets the background (v, theta); without one the
    thermal bump's theta0 is the background. Bump perturbations, velocities
    and fields add on top of it.
    """

    kind: Literal["composite"] = "composite"
    components: List[SimpleProfile] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _single_background(self) -> "CompositeProfile":
        uniforms = [c for c in self.components if isinstance(c, UniformProfile)]
        if len(uniforms) > 1:
            raise ValueError("at most one uniform component may set the background")
        bases = {c.theta0 for c in self.components if isinstance(c, ThermalBumpProfile)}
        if not uniforms and len(bases) > 1:
            raise ValueError("thermal bumps without a uniform component must share theta0")
        return self


InitialProfile = Annotated[
    Union[
        UniformProfile,
        ThermalBumpProfile,
        VelocityPushProfile,
        MagnetoPulseProfile,
        CompositeProfile,
    ],
    Field(discriminator="kind"),
]
