"""Manufactured-solution harness for the discretization of the Lagrangian system.

Each case hard-codes its fields together with their t, y and yy derivatives.
Sources are composed from those derivatives by the chain rule; a runtime
finite-difference self-check guards every hard-coded derivative and every
composed flux derivative before a case is used.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import settings
from ..core.errors import ConvergenceLevelsError, MmsSelfCheckError
from ..core.metrics import record_mms_level
from ..models.mms import MMS_FIELDS, ConvergenceTable, ErrorRow
from ..models.physics import PhysParams
from ..models.state import Grid, SimState, StateDerivative
from ..models.stepping import StepControl, StepMode
from .physics import conductivity, conductivity_derivatives, eos_derivatives, internal_energy, pressure
from .spatial_ops import BoundaryClosure
from .stepper import Stepper

logger = logging.getLogger(__name__)

_SPACE = {
    "sin": (np.sin, lambda x: np.cos(x), lambda x: -np.sin(x)),
    "cos": (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
}
_TIME = {
    "sin": (np.sin, np.cos),
    "cos": (np.cos, lambda t: -np.sin(t)),
}


@dataclass(frozen=True)
class Jet:
    value: np.ndarray
    t: np.ndarray
    y: np.ndarray
    yy: np.ndarray


@dataclass(frozen=True)
class SeparableField:
    """offset + amp * S(k y) * T(t) with S, T in {sin, cos}."""

    offset: float = 0.0
    amp: float = 0.0
    space: str = "sin"
    time: str = "cos"
    k: float = math.pi

    def value(self, y, t) -> np.ndarray:
        s = _SPACE[self.space][0](self.k * np.asarray(y, dtype=float))
        return self.offset + self.amp * s * _TIME[self.time][0](t)

    def jet(self, y, t) -> Jet:
        ky = self.k * np.asarray(y, dtype=float)
        s, s_y, s_yy = (f(ky) for f in _SPACE[self.space])
        tt, tt_t = (f(t) for f in _TIME[self.time])
        return Jet(
            value=self.offset + self.amp * s * tt,
            t=self.amp * s * tt_t * np.ones_like(ky),
            y=self.amp * self.k * s_y * tt,
            yy=self.amp * self.k**2 * s_yy * tt,
        )


@dataclass(frozen=True)
class MmsCase:
    name: str
    v: SeparableField
    theta: SeparableField
    u: SeparableField
    w2: SeparableField
    w3: SeparableField
    b2: SeparableField
    b3: SeparableField

    def fields(self) -> Dict[str, SeparableField]:
        return {name: getattr(self, name) for name in MMS_FIELDS}


ZERO = SeparableField()

MMS_CASES: Dict[str, MmsCase] = {
    "sine-bump": MmsCase(
        name="sine-bump",
        v=SeparableField(offset=1.0, amp=0.2, space="sin", time="cos"),
        theta=SeparableField(offset=1.0, amp=0.2, space="cos", time="cos"),
        u=SeparableField(amp=0.1, space="sin", time="sin"),
        w2=SeparableField(amp=0.1, space="sin", time="sin"),
        w3=ZERO,
        b2=SeparableField(amp=0.1, space="sin", time="cos"),
        b3=ZERO,
    ),
    "constant": MmsCase(
        name="constant",
        v=SeparableField(offset=1.0),
        theta=SeparableField(offset=1.0),
        u=ZERO,
        w2=ZERO,
        w3=ZERO,
        b2=ZERO,
        b3=ZERO,
    ),
}


@dataclass(frozen=True)
class MmsSources:
    mass: np.ndarray
    momentum: np.ndarray
    transverse: np.ndarray  # (n, 2)
    magnetic: np.ndarray  # (n, 2), source of (v b)_t
    energy: np.ndarray


@dataclass(frozen=True)
class _Exact:
    """Exact fields and the flux derivatives composed from them at (y, t)."""

    v: Jet
    theta: Jet
    u: Jet
    w: Tuple[Jet, Jet]
    b: Tuple[Jet, Jet]
    stress: np.ndarray
    stress_y: np.ndarray
    transverse_flux: np.ndarray  # (n, 2): b + mu w_y / v
    transverse_flux_y: np.ndarray
    magnetic_flux: np.ndarray  # (n, 2): w + nu b_y / v
    magnetic_flux_y: np.ndarray
    heat_flux: np.ndarray  # kappa theta_y / v
    heat_flux_y: np.ndarray
    energy: np.ndarray
    energy_t: np.ndarray


def _exact(case: MmsCase, y, t: float, params: PhysParams) -> _Exact:
    v, theta, u = case.v.jet(y, t), case.theta.jet(y, t), case.u.jet(y, t)
    w = (case.w2.jet(y, t), case.w3.jet(y, t))
    b = (case.b2.jet(y, t), case.b3.jet(y, t))

    p = pressure(params, v.value, theta.value)
    p_theta, p_v, e_theta = eos_derivatives(params, v.value, theta.value)
    p_y = p_theta * theta.y + p_v * v.y
    b_dot_by = b[0].value * b[0].y + b[1].value * b[1].y

    stress = -p - 0.5 * (b[0].value ** 2 + b[1].value ** 2) + params.lam * u.y / v.value
    stress_y = -p_y - b_dot_by + params.lam * (u.yy / v.value - u.y * v.y / v.value**2)

    transverse_flux = np.stack([b[k].value + params.mu * w[k].y / v.value for k in range(2)], axis=-1)
    transverse_flux_y = np.stack(
        [b[k].y + params.mu * (w[k].yy / v.value - w[k].y * v.y / v.value**2) for k in range(2)],
        axis=-1,
    )
    magnetic_flux = np.stack([w[k].value + params.nu * b[k].y / v.value for k in range(2)], axis=-1)
    magnetic_flux_y = np.stack(
        [w[k].y + params.nu * (b[k].yy / v.value - b[k].y * v.y / v.value**2) for k in range(2)],
        axis=-1,
    )

    kappa = conductivity(params, v.value, theta.value)
    kappa_theta, kappa_v = conductivity_derivatives(params, v.value, theta.value)
    kappa_y = kappa_theta * theta.y + kappa_v * v.y
    heat_flux = kappa * theta.y / v.value
    heat_flux_y = (kappa_y * theta.y + kappa * theta.yy) / v.value - kappa * theta.y * v.y / v.value**2

    energy = internal_energy(params, v.value, theta.value)
    energy_t = e_theta * theta.t + params.a * theta.value**4 * v.t

    return _Exact(
        v=v,
        theta=theta,
        u=u,
        w=w,
        b=b,
        stress=stress,
        stress_y=stress_y,
        transverse_flux=transverse_flux,
        transverse_flux_y=transverse_flux_y,
        magnetic_flux=magnetic_flux,
        magnetic_flux_y=magnetic_flux_y,
        heat_flux=heat_flux,
        heat_flux_y=heat_flux_y,
        energy=energy,
        energy_t=energy_t,
    )


def mms_sources(case: MmsCase, y, t: float, params: PhysParams) -> MmsSources:
    """Residuals of the continuum equations at the exact fields.

    Adding them to the right-hand sides makes the exact fields a solution.
    """
    ex = _exact(case, y, t, params)
    v, theta, u = ex.v, ex.theta, ex.u
    wy_sq = ex.w[0].y ** 2 + ex.w[1].y ** 2
    by_sq = ex.b[0].y ** 2 + ex.b[1].y ** 2
    p = pressure(params, v.value, theta.value)
    work = (-p + params.lam * u.y / v.value) * u.y + (params.mu * wy_sq + params.nu * by_sq) / v.value

    w_t = np.stack([ex.w[k].t for k in range(2)], axis=-1)
    vb_t = np.stack([v.t * ex.b[k].value + v.value * ex.b[k].t for k in range(2)], axis=-1)
    return MmsSources(
        mass=v.t - u.y,
        momentum=u.t - ex.stress_y,
        transverse=w_t - ex.transverse_flux_y,
        magnetic=vb_t - ex.magnetic_flux_y,
        energy=ex.energy_t - (ex.heat_flux_y + work),
    )


def _compare(label: str, analytic, numeric, tol: float, y, t) -> None:
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    error = np.abs(analytic - numeric) / (1.0 + np.abs(analytic))
    if not np.all(error <= tol):
        i = int(np.argmax(error))
        raise MmsSelfCheckError(
            f"{label}: hard-coded {analytic.ravel()[i]!r} vs finite difference "
            f"{numeric.ravel()[i]!r} at y={np.ravel(y)[i % np.size(y)]!r}, t={t!r}"
        )


def self_check(
    case: MmsCase,
    params: PhysParams,
    n_points: Optional[int] = None,
    seed: Optional[int] = None,
    t_range: float = 1.0,
) -> None:
    """Compare every hard-coded derivative with central finite differences."""
    n_points = n_points or settings.MMS_SELF_CHECK_POINTS
    rng = np.random.default_rng(settings.MMS_SELF_CHECK_SEED if seed is None else seed)
    h1, h2 = 1e-5, 1e-4
    for y, t in zip(rng.uniform(0.0, 1.0, n_points), rng.uniform(0.0, t_range, n_points)):
        for name, field in case.fields().items():
            jet = field.jet(y, t)
            _compare(f"{name}_t", jet.t, (field.value(y, t + h1) - field.value(y, t - h1)) / (2 * h1), 1e-6, y, t)
            _compare(f"{name}_y", jet.y, (field.value(y + h1, t) - field.value(y - h1, t)) / (2 * h1), 1e-6, y, t)
            second = (field.value(y + h2, t) - 2.0 * field.value(y, t) + field.value(y - h2, t)) / h2**2
            _compare(f"{name}_yy", jet.yy, second, 1e-5, y, t)

        ex = _exact(case, y, t, params)
        ahead, behind = _exact(case, y + h1, t, params), _exact(case, y - h1, t, params)
        for label in ("stress", "transverse_flux", "magnetic_flux", "heat_flux"):
            numeric = (getattr(ahead, label) - getattr(behind, label)) / (2 * h1)
            _compare(f"{label}_y", getattr(ex, f"{label}_y"), numeric, 1e-6, y, t)
        later, earlier = _exact(case, y, t + h1, params), _exact(case, y, t - h1, params)
        _compare("energy_t", ex.energy_t, (later.energy - earlier.energy) / (2 * h1), 1e-6, y, t)
    logger.info("MMS self-check passed for case %s at %d points", case.name, n_points)


class ExactDirichletClosure(BoundaryClosure):
    """Boundary data taken from the exact fields instead of the physical conditions."""

    def __init__(self, case: MmsCase, params: PhysParams):
        self.case = case
        self.params = params

    def _walls(self, t: float) -> _Exact:
        return _exact(self.case, np.array([0.0, 1.0]), t, self.params)

    def face_stress(self, state, sigma):
        ex = self._walls(state.t)
        return float(ex.stress[0]), float(ex.stress[1])

    def face_heat_flux(self, state):
        ex = self._walls(state.t)
        return float(ex.heat_flux[0]), float(ex.heat_flux[1])

    def b_ghost(self, state):
        ex = self._walls(state.t)
        wall = np.stack([ex.b[0].value, ex.b[1].value], axis=-1)
        return 2.0 * wall[0] - state.b[0], 2.0 * wall[1] - state.b[-1]

    def boundary_w_rate(self, state):
        ex = self._walls(state.t)
        rate = np.stack([ex.w[0].t, ex.w[1].t], axis=-1)
        return rate[0], rate[1]

    def pinned_u_rate(self, state):
        ex = self._walls(state.t)
        return float(ex.u.t[0]), float(ex.u.t[1])

    def pin_w(self, w, t):
        ex = self._walls(t)
        wall = np.stack([ex.w[0].value, ex.w[1].value], axis=-1)
        w[0] = wall[0]
        w[-1] = wall[1]


class MmsForcing:
    """Source terms sampled at cell centers (v, e, v*b) and nodes (u, w)."""

    def __init__(self, case: MmsCase, params: PhysParams, grid: Grid):
        self.case = case
        self.params = params
        self.grid = grid

    def __call__(self, state: SimState) -> StateDerivative:
        cells = mms_sources(self.case, self.grid.y_cells, state.t, self.params)
        nodes = mms_sources(self.case, self.grid.y_nodes, state.t, self.params)
        return StateDerivative(
            dv=cells.mass,
            de=cells.energy,
            db=cells.magnetic,
            du=nodes.momentum,
            dw=nodes.transverse,
        )


def exact_state(case: MmsCase, grid: Grid, t: float, params: PhysParams) -> SimState:
    yc, yn = grid.y_cells, grid.y_nodes
    v = case.v.value(yc, t) * np.ones_like(yc)
    theta = case.theta.value(yc, t) * np.ones_like(yc)
    return SimState(
        t=t,
        v=v,
        theta=theta,
        e=np.asarray(internal_energy(params, v, theta)),
        b=np.stack([case.b2.value(yc, t) * np.ones_like(yc), case.b3.value(yc, t) * np.ones_like(yc)], axis=-1),
        u=case.u.value(yn, t) * np.ones_like(yn),
        w=np.stack([case.w2.value(yn, t) * np.ones_like(yn), case.w3.value(yn, t) * np.ones_like(yn)], axis=-1),
    )


def field_errors(state: SimState, exact: SimState, grid: Grid) -> Dict[str, Tuple[float, float]]:
    """(L2, Linf) error per field; cells weighted by dy, nodes by node mass."""
    pairs = {
        "v": (state.v - exact.v, None),
        "u": (state.u - exact.u, grid.node_mass),
        "theta": (state.theta - exact.theta, None),
        "w2": (state.w[:, 0] - exact.w[:, 0], grid.node_mass),
        "w3": (state.w[:, 1] - exact.w[:, 1], grid.node_mass),
        "b2": (state.b[:, 0] - exact.b[:, 0], None),
        "b3": (state.b[:, 1] - exact.b[:, 1], None),
    }
    errors = {}
    for name, (diff, weights) in pairs.items():
        weights = np.full(diff.shape[0], grid.dy) if weights is None else weights
        errors[name] = (float(np.sqrt(np.sum(weights * diff**2))), float(np.max(np.abs(diff))))
    return errors


def run_level(
    case: MmsCase,
    n_cells: int,
    t_final: float,
    params: PhysParams,
    control: StepControl,
) -> Dict[str, Tuple[float, float]]:
    grid = Grid(n_cells)
    stepper = Stepper(
        params,
        grid,
        control,
        closure=ExactDirichletClosure(case, params),
        forcing=MmsForcing(case, params, grid),
    )
    final = stepper.advance_to(exact_state(case, grid, 0.0, params), t_final)
    record_mms_level(case.name)
    return field_errors(final, exact_state(case, grid, t_final, params), grid)


def _order(coarse: float, fine: float, n_coarse: int, n_fine: int) -> Optional[float]:
    if coarse <= 0.0 or fine <= 0.0:
        return None
    return math.log(coarse / fine) / math.log(n_fine / n_coarse)


def run_convergence(
    case: MmsCase,
    levels: Sequence[int],
    t_final: float,
    params: PhysParams,
    control: Optional[StepControl] = None,
    runner: Callable[..., Dict[str, Tuple[float, float]]] = run_level,
) -> ConvergenceTable:
    levels = list(levels)
    if any(fine <= coarse or fine % coarse for coarse, fine in zip(levels, levels[1:])):
        raise ConvergenceLevelsError(f"levels must ascend, each a multiple of the previous: {levels}")
    control = control or StepControl(mode=StepMode.EXPLICIT_RK2, cfl=0.9)
    if control.mode != StepMode.EXPLICIT_RK2:
        raise ValueError("manufactured-solution runs use explicit stepping")
    self_check(case, params)

    rows: List[ErrorRow] = []
    previous: Optional[Dict[str, Tuple[float, float]]] = None
    for index, n in enumerate(levels):
        logger.info("MMS case %s: level %d, N=%d, t_final=%g", case.name, index, n, t_final)
        errors = runner(case, n, t_final, params, control)
        for name in MMS_FIELDS:
            l2, linf = errors[name]
            order = None
            if previous is not None:
                order = _order(previous[name][0], l2, levels[index - 1], n)
            rows.append(ErrorRow(level=index, N=n, field=name, L2_error=l2, Linf_error=linf, observed_order=order))
        previous = errors
    return ConvergenceTable(case=case.name, t_final=t_final, rows=rows)
