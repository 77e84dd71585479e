import logging
import time
from typing import Iterable, Optional, Protocol

import numpy as np

from ..core.errors import PositivityError, SimulationError, TimeStepCollapseError
from ..core.metrics import record_abort, record_step
from ..models.physics import PhysParams
from ..models.state import Grid, SimState, StateDerivative
from ..models.stepping import StepControl, StepMode
from .physics import conductivity, eos_derivatives, internal_energy, pressure, temperature_from_energy
from .spatial_ops import (
    FREE_BOUNDARY,
    BoundaryClosure,
    Forcing,
    compute_rhs,
    interface_average,
    magnetic_gradient,
    node_volume,
)
from .tridiagonal import solve_tridiagonal

logger = logging.getLogger(__name__)

# a final step shorter than this fraction of dt is merged into the previous one
LANDING_SLACK = 1e-9


class StepObserver(Protocol):
    def on_step(self, state: SimState, prev_state: SimState) -> None:
        ...

    def on_sample(self, state: SimState) -> None:
        ...


def _first_non_positive(values: np.ndarray) -> int:
    return int(np.flatnonzero(~(values > 0))[0])


class Stepper:
    """Time integration of the semi-discrete system.

    Explicit mode is Heun's SSP-RK2 on (v, e, v*b, u, w). IMEX mode advances v
    and every non-diffusive source explicitly and the four diffusion operators
    (lambda/v on u, mu/v on w, nu/v on b, kappa/v on theta) by backward Euler
    with coefficients frozen at the pre-step state.
    """

    def __init__(
        self,
        params: PhysParams,
        grid: Grid,
        control: StepControl,
        closure: BoundaryClosure = FREE_BOUNDARY,
        forcing: Optional[Forcing] = None,
        transverse: bool = True,
    ):
        self.params = params
        self.grid = grid
        self.control = control
        self.closure = closure
        self.forcing = forcing
        self.transverse = transverse

    def rhs(self, state: SimState) -> StateDerivative:
        return compute_rhs(
            state,
            self.params,
            self.grid,
            closure=self.closure,
            forcing=self.forcing,
            transverse=self.transverse,
        )

    def stable_dt(self, state: SimState) -> float:
        params, control, dy = self.params, self.control, self.grid.dy
        v, theta = state.v, state.theta
        p_theta, p_v, e_theta = eos_derivatives(params, v, theta)
        if control.mode == StepMode.EXPLICIT_RK2:
            kappa = conductivity(params, v, theta)
            diffusivity = np.max(
                np.maximum.reduce(
                    [params.lam / v, params.mu / v, params.nu / v, kappa / (v * e_theta)]
                )
            )
            dt = min(control.dt_max, control.cfl * dy**2 / (2.0 * diffusivity))
        else:
            c_eff = np.sqrt(v * np.abs(p_v) + theta * p_theta**2 / e_theta)
            node_speed = np.abs(state.u)
            speed = np.max(np.maximum(node_speed[:-1], node_speed[1:]) + c_eff)
            dt = min(control.dt_max, control.cfl * dy / speed)
        if not (np.isfinite(dt) and dt >= control.dt_min):
            raise TimeStepCollapseError(
                f"stable dt {dt!r} fell below dt_min {control.dt_min!r}", state.t
            )
        return float(dt)

    def _stage(self, base: SimState, rates: StateDerivative, dt: float, t: float) -> SimState:
        v = base.v + dt * rates.dv
        if not np.all(v > 0):
            i = _first_non_positive(v)
            raise PositivityError("v", i, float(v[i]), base.t)
        e = base.e + dt * rates.de
        if not np.all(e > 0):
            i = _first_non_positive(e)
            raise PositivityError("e", i, float(e[i]), base.t)
        momentum = base.v[:, None] * base.b + dt * rates.db
        w = base.w + dt * rates.dw
        self.closure.pin_w(w, t)
        theta = temperature_from_energy(self.params, v, e)
        if not np.all(theta > 0):
            i = _first_non_positive(theta)
            raise PositivityError("theta", i, float(theta[i]), base.t)
        return SimState(
            t=t,
            v=v,
            theta=theta,
            e=e,
            b=momentum / v[:, None],
            u=base.u + dt * rates.du,
            w=w,
        )

    def step_explicit_rk2(self, state: SimState, dt: float) -> SimState:
        first = self.rhs(state)
        predictor = self._stage(state, first, dt, state.t + dt)
        second = self.rhs(predictor)
        mean = StateDerivative(
            dv=0.5 * (first.dv + second.dv),
            de=0.5 * (first.de + second.de),
            db=0.5 * (first.db + second.db),
            du=0.5 * (first.du + second.du),
            dw=0.5 * (first.dw + second.dw),
        )
        corrected = self._stage(state, mean, dt, state.t + dt)
        face_velocity = (
            0.5 * (float(state.u[0]) + float(predictor.u[0])),
            0.5 * (float(state.u[-1]) + float(predictor.u[-1])),
        )
        return corrected.evolve(face_velocity=face_velocity)

    def step_imex(self, state: SimState, dt: float) -> SimState:
        if self.closure.pinned_u_rate(state) is not None:
            raise ValueError("IMEX stepping supports free-boundary closures only")
        params, grid = self.params, self.grid
        dy = grid.dy
        n = grid.n_cells

        # (i) volume from the pre-step velocity
        uy = np.diff(state.u) / dy
        v_new = state.v + dt * uy
        if not np.all(v_new > 0):
            i = _first_non_positive(v_new)
            raise PositivityError("v", i, float(v_new[i]), state.t)

        # (ii) non-diffusive sources at the pre-step state
        p = pressure(params, state.v, state.theta)
        total_pressure = p
        heating = (-p + params.lam * uy / state.v) * uy
        if self.transverse:
            total_pressure = p + 0.5 * np.sum(state.b**2, axis=1)
            wy = np.diff(state.w, axis=0) / dy
            by = magnetic_gradient(state, self.closure, dy)
            vbar = node_volume(state.v)
            joule_nodes = np.sum(by**2, axis=1) / vbar
            heating = heating + (
                params.mu * np.sum(wy**2, axis=1) / state.v
                + params.nu * 0.5 * (joule_nodes[:-1] + joule_nodes[1:])
            )
        sigma = -total_pressure + params.lam * uy / state.v
        left_stress, right_stress = self.closure.face_stress(state, sigma)
        force = np.empty(n + 1)
        force[1:-1] = -np.diff(total_pressure)
        force[0] = -total_pressure[0] - left_stress
        force[-1] = total_pressure[-1] + right_stress

        # (iii) backward-Euler diffusion with frozen coefficients
        frozen = state
        result = state
        for sweep in range(self.control.picard_sweeps):
            u_new = self._solve_velocity(state.u, force, frozen.v, dt)
            if self.transverse:
                w_new = self._solve_transverse_velocity(state, frozen.v, dt)
                b_new = self._solve_magnetic(state, v_new, frozen.v, dt)
            else:
                w_new = state.w.copy()
                b_new = state.b.copy()
            e_new, theta_new = self._solve_energy(state, v_new, frozen, heating, dt)
            result = SimState(
                t=state.t + dt,
                v=v_new,
                theta=theta_new,
                e=e_new,
                b=b_new,
                u=u_new,
                w=w_new,
                face_velocity=(float(state.u[0]), float(state.u[-1])),
            )
            frozen = result
            logger.debug("IMEX sweep %d finished at t=%.6e", sweep + 1, result.t)
        return result

    def _solve_velocity(self, u: np.ndarray, force: np.ndarray, v: np.ndarray, dt: float) -> np.ndarray:
        dy = self.grid.dy
        mass = self.grid.node_mass
        coeff = np.concatenate([[0.0], self.params.lam / v, [0.0]]) / dy
        left, right = coeff[:-1], coeff[1:]
        diag = mass / dt + left + right
        return solve_tridiagonal(-left, diag, -right, mass / dt * u + force)

    def _solve_transverse_velocity(self, state: SimState, v: np.ndarray, dt: float) -> np.ndarray:
        dy = self.grid.dy
        n = self.grid.n_cells
        coeff = self.params.mu / v / dy
        lower = np.zeros(n + 1)
        upper = np.zeros(n + 1)
        diag = np.ones(n + 1)
        rhs = np.zeros_like(state.w)
        lower[1:-1] = -coeff[:-1]
        upper[1:-1] = -coeff[1:]
        diag[1:-1] = dy / dt + coeff[:-1] + coeff[1:]
        rhs[1:-1] = dy / dt * state.w[1:-1] + np.diff(state.b, axis=0)
        w_new = solve_tridiagonal(lower, diag, upper, rhs)
        self.closure.pin_w(w_new, state.t + dt)
        return w_new

    def _solve_magnetic(self, state: SimState, v_new: np.ndarray, v_frozen: np.ndarray, dt: float) -> np.ndarray:
        dy = self.grid.dy
        coeff = self.params.nu / node_volume(v_frozen) / dy**2
        # odd ghost reflection doubles the face coupling
        face = coeff.copy()
        face[0] *= 2.0
        face[-1] *= 2.0
        lower = np.concatenate([[0.0], -coeff[1:-1]])
        upper = np.concatenate([-coeff[1:-1], [0.0]])
        diag = v_new / dt + face[:-1] + face[1:]
        rhs = (state.v / dt)[:, None] * state.b + np.diff(state.w, axis=0) / dy
        return solve_tridiagonal(lower, diag, upper, rhs)

    def _solve_energy(
        self,
        state: SimState,
        v_new: np.ndarray,
        frozen: SimState,
        heating: np.ndarray,
        dt: float,
    ):
        params, grid = self.params, self.grid
        dy = grid.dy
        _, _, e_theta = eos_derivatives(params, frozen.v, frozen.theta)
        kappa_over_v = conductivity(params, frozen.v, frozen.theta) / frozen.v
        conductance = np.zeros(grid.n_cells + 1)
        conductance[1:-1] = interface_average(kappa_over_v, grid.conductivity_mean) / dy**2
        left, right = conductance[:-1], conductance[1:]
        diag = e_theta / dt + left + right
        explicit_e = state.e + dt * heating
        rhs = (e_theta * state.theta + explicit_e - internal_energy(params, v_new, state.theta)) / dt
        theta_star = solve_tridiagonal(-left, diag, -right, rhs)

        flux = np.zeros(grid.n_cells + 1)
        flux[1:-1] = conductance[1:-1] * dy * np.diff(theta_star)
        e_new = explicit_e + dt * np.diff(flux) / dy
        if not np.all(e_new > 0):
            i = _first_non_positive(e_new)
            raise PositivityError("e", i, float(e_new[i]), state.t)
        theta_new = temperature_from_energy(params, v_new, e_new)
        if not np.all(theta_new > 0):
            i = _first_non_positive(theta_new)
            raise PositivityError("theta", i, float(theta_new[i]), state.t)
        return e_new, theta_new

    def step(self, state: SimState, dt: float) -> SimState:
        if self.control.mode == StepMode.IMEX:
            return self.step_imex(state, dt)
        return self.step_explicit_rk2(state, dt)

    def advance_to(
        self,
        state: SimState,
        t_end: float,
        observer: Optional[StepObserver] = None,
        sample_times: Iterable[float] = (),
    ) -> SimState:
        """Advance to exactly ``t_end``, landing on every sample time on the way.

        The observer sees the initial state and every sample time through
        ``on_sample`` and every accepted step through ``on_step``.
        """
        if t_end < state.t:
            raise ValueError(f"t_end {t_end!r} precedes the state time {state.t!r}")
        stops = sorted({float(t) for t in sample_times if state.t < t < t_end})
        stops.append(float(t_end))
        mode = self.control.mode.value

        if observer is not None:
            observer.on_sample(state)
        current = state
        for stop in stops:
            while current.t < stop:
                try:
                    dt = self.stable_dt(current)
                    remaining = stop - current.t
                    landing = dt >= remaining or remaining - dt <= LANDING_SLACK * dt
                    if landing:
                        dt = remaining
                    started = time.perf_counter()
                    new_state = self.step(current, dt)
                    if landing:
                        new_state = new_state.evolve(t=stop)
                    record_step(mode, time.perf_counter() - started, new_state.t, dt)
                    if observer is not None:
                        observer.on_step(new_state, current)
                except SimulationError as exc:
                    record_abort(type(exc).__name__)
                    logger.error("step aborted at t=%.17g: %s", current.t, exc.message)
                    raise exc.at_time(current.t)
                current = new_state
            if observer is not None and stop > state.t:
                observer.on_sample(current)
        return current
