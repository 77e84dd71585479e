"""Monitored functionals: energy, entropy pair, interface width, X/Y/Z, extrema.

Cell quantities are integrated by the midpoint rule, node quantities with the
node masses. The entropy production uses the same stencils as the spatial
operator so that dS/dt equals V_rate in semi-discrete form.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..models.diagnostics import AuditCheck, AuditReport, AuditTolerances, DiagSample
from ..models.physics import PhysParams
from ..models.state import Grid, SimState
from .physics import conductivity
from .spatial_ops import FREE_BOUNDARY, BoundaryClosure, interface_average, magnetic_gradient, node_volume

logger = logging.getLogger(__name__)

# accumulated column -> integrand it integrates over time
TIME_INTEGRALS = {
    "V_cum": "V_rate",
    "X_cum": "X_rate",
    "theta_q4_cum": "theta_q4_max",
    "b_inf2_cum": "b_inf2",
    "wyy2_cum": "wyy2",
    "byy2_cum": "byy2",
    "b_by2_cum": "b_by2",
    "b8_cum": "b8",
    "theta_vy2_cum": "theta_vy2",
    "uy4_cum": "uy4",
}


def _second_derivative(u: np.ndarray, dy: float) -> np.ndarray:
    uyy = np.empty_like(u)
    uyy[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dy**2
    uyy[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / dy**2
    uyy[-1] = (2.0 * u[-1] - 5.0 * u[-2] + 4.0 * u[-3] - u[-4]) / dy**2
    return uyy


def entropy_rate(
    state: SimState,
    params: PhysParams,
    grid: Grid,
    closure: BoundaryClosure = FREE_BOUNDARY,
) -> float:
    """V = int (lambda u_y^2 + mu |w_y|^2 + nu |b_y|^2)/(v theta) + kappa theta_y^2/(v theta^2)."""
    dy = grid.dy
    v, theta = state.v, state.theta
    uy = np.diff(state.u) / dy
    wy = np.diff(state.w, axis=0) / dy
    by = magnetic_gradient(state, closure, dy)
    joule_nodes = np.sum(by**2, axis=1) / node_volume(v)
    joule = 0.5 * (joule_nodes[:-1] + joule_nodes[1:])
    cells = (params.lam * uy**2 + params.mu * np.sum(wy**2, axis=1)) / (v * theta) + params.nu * joule / theta

    kappa_bar = interface_average(conductivity(params, v, theta) / v, grid.conductivity_mean)
    theta_y = np.diff(theta) / dy
    nodes = kappa_bar * theta_y**2 / (theta[:-1] * theta[1:])
    return float(dy * np.sum(cells) + dy * np.sum(nodes))


def step_integrands(
    state: SimState,
    prev_state: Optional[SimState],
    params: PhysParams,
    grid: Grid,
    closure: BoundaryClosure = FREE_BOUNDARY,
) -> Dict[str, float]:
    """Instantaneous values of every quantity that is integrated in time.

    theta_t in X_rate is a backward difference against ``prev_state``; without
    one it is taken as zero.
    """
    dy = grid.dy
    mass = grid.node_mass
    v, theta, b = state.v, state.theta, state.b

    if prev_state is not None and state.t > prev_state.t:
        theta_t = (theta - prev_state.theta) / (state.t - prev_state.t)
        x_rate = float(dy * np.sum((1.0 + theta**params.q) * theta_t**2))
    else:
        x_rate = 0.0

    ghost_left, ghost_right = closure.b_ghost(state)
    extended = np.vstack([ghost_left[None, :], b, ghost_right[None, :]])
    byy = (extended[2:] - 2.0 * b + extended[:-2]) / dy**2
    by = np.diff(extended, axis=0) / dy
    b_nodes = 0.5 * (extended[:-1] + extended[1:])
    b_squared = np.sum(b**2, axis=1)
    wyy = _second_derivative(state.w, dy)
    vy = np.diff(v) / dy
    theta_mid = 0.5 * (theta[:-1] + theta[1:])
    uy = np.diff(state.u) / dy

    return {
        "V_rate": entropy_rate(state, params, grid, closure),
        "X_rate": x_rate,
        "theta_q4_max": float(np.max(theta ** (params.q + 4.0))),
        "b_inf2": float(np.max(b_squared)),
        "wyy2": float(np.sum(mass * np.sum(wyy**2, axis=1))),
        "byy2": float(dy * np.sum(byy**2)),
        "b_by2": float(np.sum(mass * np.sum(b_nodes * by, axis=1) ** 2)),
        "b8": float(dy * np.sum(b_squared**4)),
        "theta_vy2": float(dy * np.sum(theta_mid * vy**2)),
        "uy4": float(dy * np.sum(uy**4)),
    }


@dataclass(frozen=True)
class TimeIntegrals:
    """Trapezoid-rule running totals of the TIME_INTEGRALS integrands."""

    t: float
    rates: Dict[str, float]
    totals: Dict[str, float]

    @classmethod
    def starting(cls, t: float, rates: Dict[str, float]) -> "TimeIntegrals":
        return cls(t=t, rates=rates, totals={column: 0.0 for column in TIME_INTEGRALS})

    @classmethod
    def from_sample(cls, running: DiagSample) -> "TimeIntegrals":
        return cls(
            t=running.t,
            rates=running.rates,
            totals={column: getattr(running, column) for column in TIME_INTEGRALS},
        )

    def advance(self, t: float, rates: Dict[str, float]) -> "TimeIntegrals":
        half = 0.5 * (t - self.t)
        totals = {
            column: self.totals[column] + half * (rates[name] + self.rates.get(name, 0.0))
            for column, name in TIME_INTEGRALS.items()
        }
        return TimeIntegrals(t=t, rates=rates, totals=totals)


def sample(
    state: SimState,
    prev_state: Optional[SimState],
    params: PhysParams,
    grid: Grid,
    running: Optional[DiagSample] = None,
    integrals: Optional[TimeIntegrals] = None,
) -> DiagSample:
    """Evaluate every monitored functional at ``state``.

    Time integrals come from ``integrals`` when it is already advanced to
    ``state.t``; otherwise they are advanced one trapezoid from ``running``
    (the previous sample) with ``prev_state`` supplying theta_t for X.
    """
    if integrals is None:
        rates = step_integrands(state, prev_state, params, grid)
        if running is None:
            integrals = TimeIntegrals.starting(state.t, rates)
        else:
            integrals = TimeIntegrals.from_sample(running).advance(state.t, rates)
    rates, totals = integrals.rates, integrals.totals

    dy = grid.dy
    q = params.q
    v, theta, e, b, u, w = state.v, state.theta, state.e, state.b, state.u, state.w
    mass = grid.node_mass

    kinetic = 0.5 * np.sum(mass * (u**2 + np.sum(w**2, axis=1)))
    magnetic = 0.5 * dy * np.sum(v * np.sum(b**2, axis=1))
    energy = dy * np.sum(e) + kinetic + magnetic

    entropy = dy * np.sum(
        params.C_v * np.log(theta) + params.R * np.log(v) + 4.0 / 3.0 * params.a * v * theta**3
    )
    relative_entropy = dy * np.sum(
        params.C_v * (theta - 1.0 - np.log(theta)) + params.R * (v - 1.0 - np.log(v))
    )

    theta_y = np.diff(theta) / dy
    theta_mid = 0.5 * (theta[:-1] + theta[1:])
    y_now = dy * np.sum((1.0 + theta_mid ** (2.0 * q)) * theta_y**2)
    z_now = np.sum(mass * _second_derivative(u, dy) ** 2)

    rho = 1.0 / v
    rho_y = np.diff(rho) / dy
    b_squared = np.sum(b**2, axis=1)

    return DiagSample(
        t=state.t,
        E_total=float(energy),
        S_entropy=float(entropy),
        U_func=float(relative_entropy),
        V_rate=rates["V_rate"],
        L_width=float(dy * np.sum(v)),
        Y_now=float(y_now),
        Z_now=float(z_now),
        rho_min=float(np.min(rho)),
        rho_max=float(np.max(rho)),
        theta_min=float(np.min(theta)),
        theta_max=float(np.max(theta)),
        theta4_int=float(dy * np.sum(theta**4)),
        b2_int=float(dy * np.sum(b_squared)),
        uy_max=float(np.max(np.abs(np.diff(u) / dy))),
        theta_q4_max=rates["theta_q4_max"],
        theta8_int=float(dy * np.sum(theta**8)),
        rho_y_l2=float(dy * np.sum(rho_y**2)),
        vtheta3_int=float(dy * np.sum(v * theta**3)),
        uy_L4=float(totals["uy4_cum"] ** 0.25),
        rates=rates,
        **totals,
    )


class DiagnosticsMonitor:
    """Advances the time integrals over every accepted step and takes the full
    samples at output times only."""

    def __init__(self, params: PhysParams, grid: Grid):
        self.params = params
        self.grid = grid
        self.integrals: Optional[TimeIntegrals] = None
        self.series: List[DiagSample] = []

    def _integrands(self, state: SimState, prev_state: Optional[SimState]) -> Dict[str, float]:
        return step_integrands(state, prev_state, self.params, self.grid)

    def on_step(self, state: SimState, prev_state: SimState) -> None:
        if self.integrals is None:
            self.integrals = TimeIntegrals.starting(prev_state.t, self._integrands(prev_state, None))
        self.integrals = self.integrals.advance(state.t, self._integrands(state, prev_state))

    def on_sample(self, state: SimState) -> DiagSample:
        if self.integrals is None:
            self.integrals = TimeIntegrals.starting(state.t, self._integrands(state, None))
        elif self.integrals.t != state.t:
            self.integrals = self.integrals.advance(state.t, self._integrands(state, None))
        current = sample(state, None, self.params, self.grid, integrals=self.integrals)
        self.series.append(current)
        logger.info(
            "t=%.6g E=%.12g S=%.12g V=%.6g L=%.12g",
            state.t,
            current.E_total,
            current.S_entropy,
            current.V_rate,
            current.L_width,
        )
        return current


def check_estimates(series: List[DiagSample], tolerances: AuditTolerances) -> AuditReport:
    if len(series) < 2:
        raise ValueError(f"an audit needs at least 2 samples, got {len(series)}")
    checks: List[AuditCheck] = []
    t = np.array([s.t for s in series])

    energy = np.array([s.E_total for s in series])
    drift = np.abs(energy - energy[0]) / abs(energy[0])
    bad = np.flatnonzero(~(drift <= tolerances.energy))
    checks.append(
        AuditCheck(
            name="energy_conservation",
            passed=bad.size == 0,
            value=float(np.max(drift)),
            detail=f"first violation at sample {bad[0]} t={t[bad[0]]:.17g}" if bad.size else "",
        )
    )

    entropy = np.array([s.S_entropy for s in series])
    v_cum = np.array([s.V_cum for s in series])
    dt = np.diff(t)
    d_entropy = np.diff(entropy)
    residual = np.abs(d_entropy - np.diff(v_cum))
    bad = np.flatnonzero(~(d_entropy >= -tolerances.entropy_slack * dt))
    checks.append(
        AuditCheck(
            name="entropy_production",
            passed=bad.size == 0,
            value=float(np.max(residual)),
            detail=(
                f"decrease in interval {bad[0]} [{t[bad[0]]:.17g}, {t[bad[0] + 1]:.17g}]"
                if bad.size
                else "max |dS - int V dt| per interval"
            ),
        )
    )

    width = np.array([s.L_width for s in series])
    growth = width / (1.0 + t)
    checks.append(
        AuditCheck(
            name="interface_expansion",
            passed=bool(np.all(width > 0) and np.all(np.isfinite(growth))),
            value=float(np.max(growth)),
            detail="observed C in L(t) <= C(1+t)",
        )
    )

    theta_min = min(s.theta_min for s in series)
    rho_min = min(s.rho_min for s in series)
    checks.append(
        AuditCheck(
            name="positivity",
            passed=bool(theta_min > 0 and rho_min > 0),
            value=float(min(theta_min, rho_min)),
            detail=f"theta_min={theta_min:.17g} rho_min={rho_min:.17g}",
        )
    )

    bound = np.array([s.U_func + s.V_cum for s in series])
    checks.append(
        AuditCheck(
            name="entropy_bound",
            passed=bool(np.all(np.isfinite(bound))),
            value=float(np.max(bound)),
            detail="max U + int V dt",
            informational=True,
        )
    )
    for name, field in (("Y_max", "Y_now"), ("Z_max", "Z_now")):
        values = np.array([getattr(s, field) for s in series])
        checks.append(
            AuditCheck(
                name=name,
                passed=bool(np.all(np.isfinite(values))),
                value=float(np.max(values)),
                informational=True,
            )
        )

    return AuditReport(checks=checks, n_samples=len(series), t_final=float(t[-1]))
