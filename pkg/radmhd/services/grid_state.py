import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import ConfigError, ConfigIssue
from ..models.physics import PhysParams
from ..models.profiles import (
    CompositeProfile,
    MagnetoPulseProfile,
    ThermalBumpProfile,
    UniformProfile,
    VelocityPushProfile,
)
from ..models.state import Grid, SimState, Violation
from .physics import internal_energy

logger = logging.getLogger(__name__)


def _contributions(grid: Grid, profile) -> Dict[str, np.ndarray]:
    n = grid.n_cells
    if isinstance(profile, UniformProfile):
        return {}
    if isinstance(profile, ThermalBumpProfile):
        return {"theta": profile.amp * np.cos(np.pi * grid.y_cells)}
    if isinstance(profile, VelocityPushProfile):
        w = np.zeros((n + 1, 2))
        w[:, 0] = profile.w_amp * np.sin(np.pi * grid.y_nodes)
        return {"u": profile.u_amp * np.sin(np.pi * grid.y_nodes), "w": w}
    if isinstance(profile, MagnetoPulseProfile):
        b = np.zeros((n, 2))
        b[:, 0] = profile.b_amp * np.sin(np.pi * grid.y_cells)
        return {"b": b}
    raise ConfigError([ConfigIssue(path="init.kind", reason=f"unsupported profile {profile!r}")])


def _background(components) -> Tuple[float, float]:
    """(v, theta) the perturbations ride on: a uniform component if present,
    else the thermal bump's theta0, else the rest state."""
    for component in components:
        if isinstance(component, UniformProfile):
            return component.v, component.theta
    for component in components:
        if isinstance(component, ThermalBumpProfile):
            return 1.0, component.theta0
    return 1.0, 1.0


def make_initial_state(grid: Grid, profile, params: PhysParams) -> SimState:
    components = profile.components if isinstance(profile, CompositeProfile) else [profile]
    n = grid.n_cells

    sums: Dict[str, Optional[np.ndarray]] = {"theta": None, "u": None, "w": None, "b": None}
    for component in components:
        for key, value in _contributions(grid, component).items():
            sums[key] = value if sums[key] is None else sums[key] + value

    v0, theta0 = _background(components)
    v = np.full(n, v0)
    theta = np.full(n, theta0) if sums["theta"] is None else theta0 + sums["theta"]
    u = sums["u"] if sums["u"] is not None else np.zeros(n + 1)
    w = sums["w"] if sums["w"] is not None else np.zeros((n + 1, 2))
    b = sums["b"] if sums["b"] is not None else np.zeros((n, 2))

    issues: List[ConfigIssue] = []
    if not np.all(v > 0):
        issues.append(ConfigIssue(path="init", reason=f"specific volume dips to {np.min(v)!r} <= 0"))
    if not np.all(theta > 0):
        issues.append(ConfigIssue(path="init", reason=f"temperature dips to {np.min(theta)!r} <= 0"))
    if issues:
        raise ConfigError(issues)

    # sin(pi y) vanishes at the end nodes only up to rounding
    w[0] = 0.0
    w[-1] = 0.0

    state = SimState(
        t=0.0,
        v=v.astype(float),
        theta=theta.astype(float),
        e=np.asarray(internal_energy(params, v, theta), dtype=float),
        b=b.astype(float),
        u=u.astype(float),
        w=w.astype(float),
    )
    logger.debug("initial state built on %d cells from %s", n, type(profile).__name__)
    return state


def validate(state: SimState) -> List[Violation]:
    violations: List[Violation] = []
    for name in ("v", "theta"):
        values = getattr(state, name)
        for index in np.flatnonzero(~(values > 0)):
            violations.append(Violation(name, int(index), float(values[index]), "must be > 0"))
    for index, label in ((0, "w(0)=0"), (state.w.shape[0] - 1, "w(1)=0")):
        for component in range(state.w.shape[1]):
            value = float(state.w[index, component])
            if value != 0.0:
                violations.append(
                    Violation(f"w{component + 2}", index, value, f"boundary condition {label}")
                )
    return violations
