"""Eulerian geometry recovered from the Lagrangian solution.

The boundary particles sit at y = 0 and y = 1, so the free boundaries move
with the boundary-node velocities: a'(t) = u(0, t), b'(t) = u(1, t).
"""
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..models.state import SimState

logger = logging.getLogger(__name__)


def eulerian_positions(state: SimState, a_left_now: float) -> np.ndarray:
    """x_0 = a(t), x_{j+1} = x_j + v_j dy."""
    dy = 1.0 / state.n_cells
    x = np.empty(state.n_cells + 1)
    x[0] = a_left_now
    x[1:] = a_left_now + np.cumsum(state.v * dy)
    return x


@dataclass
class InterfaceTrack:
    """Positions a(t), b(t) of the free boundaries; a(0) = 0 by convention."""

    t: float = 0.0
    a: float = 0.0
    b: float = 1.0
    t_samples: List[float] = field(default_factory=list)
    a_left: List[float] = field(default_factory=list)
    b_right: List[float] = field(default_factory=list)

    @classmethod
    def starting_at(cls, state: SimState) -> "InterfaceTrack":
        return cls(t=state.t, a=0.0, b=float(np.sum(state.v) * (1.0 / state.n_cells)))

    @property
    def width_now(self) -> float:
        return self.b - self.a

    @property
    def width(self) -> List[float]:
        return [right - left for left, right in zip(self.a_left, self.b_right)]

    def record(self) -> None:
        self.t_samples.append(self.t)
        self.a_left.append(self.a)
        self.b_right.append(self.b)

    def rows(self) -> List[List[float]]:
        return [
            [t, left, right, right - left, (right - left) / (1.0 + t)]
            for t, left, right in zip(self.t_samples, self.a_left, self.b_right)
        ]


def advance_interfaces(track: InterfaceTrack, state: SimState, dt: float) -> InterfaceTrack:
    """Trapezoidal boundary update over the accepted step that produced ``state``.

    The stepper records on the new state the stage-averaged boundary
    velocities it applied to the volume update; without that record the
    boundary-node velocities of ``state`` are used.
    """
    if state.face_velocity is not None:
        u_left, u_right = state.face_velocity
    else:
        u_left, u_right = float(state.u[0]), float(state.u[-1])
    track.a += dt * u_left
    track.b += dt * u_right
    track.t = state.t
    return track
