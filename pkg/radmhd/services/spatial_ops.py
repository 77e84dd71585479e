"""Semi-discretization of the Lagrangian system on the staggered mass grid.

Cells carry v, e (theta), b; nodes carry u, w. Every rate is a difference of
fluxes, so momentum and total energy telescope to boundary terms that the
closure controls.
"""
import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..models.physics import PhysParams
from ..models.state import Grid, InterfaceMean, SimState, StateDerivative
from .physics import conductivity, pressure

logger = logging.getLogger(__name__)

Forcing = Callable[[SimState], StateDerivative]


class BoundaryClosure(ABC):
    """Boundary data for the two material faces y = 0 and y = 1."""

    @abstractmethod
    def face_stress(self, state: SimState, sigma: np.ndarray) -> Tuple[float, float]:
        """Total stress acting on the left and right faces."""

    @abstractmethod
    def face_heat_flux(self, state: SimState) -> Tuple[float, float]:
        """Heat flux (kappa/v) theta_y through the faces."""

    @abstractmethod
    def b_ghost(self, state: SimState) -> Tuple[np.ndarray, np.ndarray]:
        """Ghost-cell values of b beyond each face."""

    @abstractmethod
    def boundary_w_rate(self, state: SimState) -> Tuple[np.ndarray, np.ndarray]:
        """Rate of w at the two boundary nodes."""

    def pinned_u_rate(self, state: SimState) -> Optional[Tuple[float, float]]:
        """Rate of u at the boundary nodes when they are prescribed, else None."""
        return None

    def pin_w(self, w: np.ndarray, t: float) -> None:
        """Overwrite the boundary rows of a freshly updated w in place."""
        w[0] = 0.0
        w[-1] = 0.0


class FreeBoundaryClosure(BoundaryClosure):
    """Stress-free, insulated faces with w = 0 and b = 0 (odd reflection)."""

    def face_stress(self, state, sigma):
        return 0.0, 0.0

    def face_heat_flux(self, state):
        return 0.0, 0.0

    def b_ghost(self, state):
        return -state.b[0], -state.b[-1]

    def boundary_w_rate(self, state):
        zero = np.zeros(state.w.shape[1])
        return zero, zero


FREE_BOUNDARY = FreeBoundaryClosure()


def stress_cells(state: SimState, params: PhysParams, transverse: bool = True) -> np.ndarray:
    """sigma_i = -p_i - |b_i|^2/2 + lambda (u_y)_i / v_i."""
    dy = 1.0 / state.n_cells
    uy = np.diff(state.u) / dy
    total_pressure = pressure(params, state.v, state.theta)
    if transverse:
        total_pressure = total_pressure + 0.5 * np.sum(state.b**2, axis=1)
    return -total_pressure + params.lam * uy / state.v


def interface_average(values: np.ndarray, mean: InterfaceMean) -> np.ndarray:
    """Average of adjacent cell values at the N-1 interior nodes."""
    left, right = values[:-1], values[1:]
    if mean == InterfaceMean.HARMONIC:
        return 2.0 * left * right / (left + right)
    return 0.5 * (left + right)


def node_volume(v: np.ndarray) -> np.ndarray:
    """Arithmetic mean of adjacent cell volumes; boundary nodes take their only cell."""
    vbar = np.empty(v.shape[0] + 1)
    vbar[1:-1] = 0.5 * (v[:-1] + v[1:])
    vbar[0] = v[0]
    vbar[-1] = v[-1]
    return vbar


def magnetic_gradient(state: SimState, closure: BoundaryClosure, dy: float) -> np.ndarray:
    """(b_y)_j at all N+1 nodes using ghost cells at the walls."""
    ghost_left, ghost_right = closure.b_ghost(state)
    extended = np.vstack([ghost_left[None, :], state.b, ghost_right[None, :]])
    # ghost centers sit dy/2 outside the face, so the face gradient spans dy
    return np.diff(extended, axis=0) / dy


def heat_flux(
    state: SimState,
    params: PhysParams,
    grid: Grid,
    closure: BoundaryClosure = FREE_BOUNDARY,
) -> np.ndarray:
    """F_j = (kappa/v)bar_j (theta_j - theta_{j-1}) / dy at nodes; faces from the closure."""
    kappa_over_v = conductivity(params, state.v, state.theta) / state.v
    flux = np.empty(grid.n_cells + 1)
    flux[1:-1] = interface_average(kappa_over_v, grid.conductivity_mean) * np.diff(state.theta) / grid.dy
    flux[0], flux[-1] = closure.face_heat_flux(state)
    return flux


def compute_rhs(
    state: SimState,
    params: PhysParams,
    grid: Grid,
    closure: BoundaryClosure = FREE_BOUNDARY,
    forcing: Optional[Forcing] = None,
    transverse: bool = True,
) -> StateDerivative:
    """Rates of (v, e, v*b, u, w) for the semi-discrete system.

    With ``transverse=False`` the w and b equations and their couplings are
    skipped entirely (pure radiative Navier-Stokes through the same stencils).
    """
    dy = grid.dy
    v, u = state.v, state.u
    uy = np.diff(u) / dy
    p = pressure(params, v, state.theta)

    sigma = stress_cells(state, params, transverse=transverse)
    left_stress, right_stress = closure.face_stress(state, sigma)
    du = np.empty(grid.n_cells + 1)
    du[1:-1] = np.diff(sigma) / dy
    du[0] = (sigma[0] - left_stress) / (0.5 * dy)
    du[-1] = (right_stress - sigma[-1]) / (0.5 * dy)

    flux = heat_flux(state, params, grid, closure)
    de = np.diff(flux) / dy + (-p + params.lam * uy / v) * uy

    n_comp = state.w.shape[1]
    if transverse:
        wy = np.diff(state.w, axis=0) / dy
        cell_flux = state.b + params.mu * wy / v[:, None]
        dw = np.empty_like(state.w)
        dw[1:-1] = np.diff(cell_flux, axis=0) / dy

        by = magnetic_gradient(state, closure, dy)
        vbar = node_volume(v)
        node_flux = state.w + params.nu * by / vbar[:, None]
        db = np.diff(node_flux, axis=0) / dy

        joule_nodes = np.sum(by**2, axis=1) / vbar
        joule = 0.5 * (joule_nodes[:-1] + joule_nodes[1:])
        de = de + (params.mu * np.sum(wy**2, axis=1) / v + params.nu * joule)
    else:
        dw = np.zeros((grid.n_cells + 1, n_comp))
        db = np.zeros((grid.n_cells, n_comp))

    if forcing is not None:
        source = forcing(state)
        uy = uy + source.dv
        de = de + source.de
        db = db + source.db
        du = du + source.du
        dw = dw + source.dw

    # boundary-node rates come from the closure alone
    pinned = closure.pinned_u_rate(state)
    if pinned is not None:
        du[0], du[-1] = pinned
    if transverse:
        dw[0], dw[-1] = closure.boundary_w_rate(state)
    return StateDerivative(dv=uy, de=de, db=db, du=du, dw=dw)


def boundary_residuals(
    state: SimState,
    params: PhysParams,
    grid: Grid,
    closure: BoundaryClosure = FREE_BOUNDARY,
) -> Dict[str, float]:
    """Magnitudes of every free-boundary condition at the current state."""
    sigma = stress_cells(state, params)
    left_stress, right_stress = closure.face_stress(state, sigma)
    left_flux, right_flux = closure.face_heat_flux(state)
    ghost_left, ghost_right = closure.b_ghost(state)
    return {
        "w_left": float(np.max(np.abs(state.w[0]))),
        "w_right": float(np.max(np.abs(state.w[-1]))),
        "heat_flux_left": abs(float(left_flux)),
        "heat_flux_right": abs(float(right_flux)),
        "stress_left": abs(float(left_stress)),
        "stress_right": abs(float(right_stress)),
        "b_wall_left": float(np.max(np.abs(0.5 * (ghost_left + state.b[0])))),
        "b_wall_right": float(np.max(np.abs(0.5 * (ghost_right + state.b[-1])))),
    }
