from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class InterfaceMean(str, Enum):
    ARITHMETIC = "arithmetic"
    HARMONIC = "harmonic"


@dataclass(frozen=True)
class Grid:
    """Uniform staggered mass grid on [0, 1].

    Nodes y_j = j*dy (j = 0..N) carry velocities, cells (centers y_{i+1/2})
    carry thermodynamic fields and the transverse magnetic field.
    """

    n_cells: int
    conductivity_mean: InterfaceMean = InterfaceMean.ARITHMETIC
    dy: float = field(init=False)
    y_nodes: np.ndarray = field(init=False, repr=False)
    y_cells: np.ndarray = field(init=False, repr=False)
    node_mass: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_cells < 4:
            raise ValueError(f"n_cells must be >= 4, got {self.n_cells}")
        dy = 1.0 / self.n_cells
        y_nodes = np.arange(self.n_cells + 1) * dy
        node_mass = np.full(self.n_cells + 1, dy)
        node_mass[0] = node_mass[-1] = 0.5 * dy
        object.__setattr__(self, "dy", dy)
        object.__setattr__(self, "y_nodes", y_nodes)
        object.__setattr__(self, "y_cells", (np.arange(self.n_cells) + 0.5) * dy)
        object.__setattr__(self, "node_mass", node_mass)


@dataclass(frozen=True)
class SimState:
    """Evolved fields at one instant.

    ``e`` is carried alongside ``theta`` because internal energy is the evolved
    thermal variable; ``theta`` is always its inversion. ``face_velocity`` holds
    the boundary-node velocities (left, right) that moved the volume during the
    step that produced this state, averaged over the stages.
    """

    t: float
    v: np.ndarray  # (N,)
    theta: np.ndarray  # (N,)
    e: np.ndarray  # (N,)
    b: np.ndarray  # (N, 2)
    u: np.ndarray  # (N + 1,)
    w: np.ndarray  # (N + 1, 2)
    face_velocity: Optional[Tuple[float, float]] = None

    @property
    def n_cells(self) -> int:
        return self.v.shape[0]

    def evolve(self, **changes) -> "SimState":
        return replace(self, **changes)


@dataclass(frozen=True)
class StateDerivative:
    dv: np.ndarray  # (N,)
    de: np.ndarray  # (N,)
    db: np.ndarray  # (N, 2), rate of v*b
    du: np.ndarray  # (N + 1,)
    dw: np.ndarray  # (N + 1, 2)


@dataclass(frozen=True)
class Violation:
    field: str
    index: int
    value: float
    message: str

    def __str__(self) -> str:
        return f"{self.field}[{self.index}] = {self.value!r}: {self.message}"
