"""Equation of state, transport coefficients and the energy -> temperature inversion.

All functions accept scalars or numpy arrays and broadcast like numpy ufuncs.
"""
import logging
from typing import Tuple, Union

import numpy as np

from ..core.errors import DomainError, TemperatureInversionError
from ..core.metrics import record_newton_fallback
from ..models.physics import KappaForm, PhysParams

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

NEWTON_MAX_ITER = 50
BISECTION_MAX_ITER = 200
RESIDUAL_RTOL = 1e-12


def _check_state(v: ArrayLike, theta: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    v = np.asarray(v, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if not np.all(v > 0):
        raise DomainError(f"specific volume must be > 0, got min {np.min(v)!r}")
    if not np.all(theta >= 0):
        raise DomainError(f"temperature must be >= 0, got min {np.min(theta)!r}")
    return v, theta


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if value.ndim == 0 else value


def pressure(params: PhysParams, v: ArrayLike, theta: ArrayLike) -> ArrayLike:
    """p = R theta / v + (a/3) theta^4."""
    v, theta = _check_state(v, theta)
    return _out(params.R * theta / v + params.a / 3.0 * theta**4)


def internal_energy(params: PhysParams, v: ArrayLike, theta: ArrayLike) -> ArrayLike:
    """e = C_v theta + a v theta^4."""
    v, theta = _check_state(v, theta)
    return _out(params.C_v * theta + params.a * v * theta**4)


def eos_derivatives(
    params: PhysParams, v: ArrayLike, theta: ArrayLike
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Return (p_theta, p_v, e_theta)."""
    v, theta = _check_state(v, theta)
    p_theta = params.R / v + 4.0 * params.a / 3.0 * theta**3
    p_v = -params.R * theta / v**2
    e_theta = params.C_v + 4.0 * params.a * v * theta**3
    return _out(p_theta), _out(p_v), _out(e_theta)


def conductivity(params: PhysParams, v: ArrayLike, theta: ArrayLike) -> ArrayLike:
    v, theta = _check_state(v, theta)
    if params.kappa_form == KappaForm.BOUNDED_POWER:
        kappa = params.kappa1 * (1.0 + theta**params.q)
    else:
        kappa = params.kappa1 + params.kappa2 * theta**params.q * v
    return _out(kappa)


def conductivity_derivatives(
    params: PhysParams, v: ArrayLike, theta: ArrayLike
) -> Tuple[ArrayLike, ArrayLike]:
    """Return (kappa_theta, kappa_v); used by the manufactured-solution sources."""
    v, theta = _check_state(v, theta)
    q = params.q
    if q == 0:
        d_power = np.zeros_like(theta)
    else:
        d_power = q * theta ** (q - 1.0)
    if params.kappa_form == KappaForm.BOUNDED_POWER:
        kappa_theta = params.kappa1 * d_power
        kappa_v = np.zeros_like(v * theta)
    else:
        kappa_theta = params.kappa2 * d_power * v
        kappa_v = params.kappa2 * theta**q * np.ones_like(v)
    return _out(np.asarray(kappa_theta)), _out(np.asarray(kappa_v))


def temperature_from_energy(params: PhysParams, v: ArrayLike, e: ArrayLike) -> ArrayLike:
    """Invert e = C_v theta + a v theta^4 for theta >= 0.

    Newton starts from min(e/C_v, (e/(a v))^(1/4)); both are upper bounds of the
    root and the residual is convex and increasing, so the iterates decrease
    monotonically onto the root. Entries that leave the bracket [0, theta0] are
    finished by bisection.
    """
    v = np.asarray(v, dtype=float)
    e = np.asarray(e, dtype=float)
    if not np.all(v > 0):
        raise DomainError(f"specific volume must be > 0, got min {np.min(v)!r}")
    if not np.all(e >= 0):
        raise DomainError(f"internal energy must be >= 0, got min {np.min(e)!r}")
    v, e = np.broadcast_arrays(v, e)
    shape = v.shape
    # flat working copies; 0-d inputs cannot be fancy-indexed
    v = v.ravel().copy()
    e = e.ravel().copy()

    C_v, a = params.C_v, params.a
    upper = e / C_v
    if a > 0:
        upper = np.minimum(upper, (e / (a * v)) ** 0.25)
    tol = RESIDUAL_RTOL * np.maximum(1.0, e)

    theta = upper.copy()
    residual = C_v * theta + a * v * theta**4 - e
    converged = np.abs(residual) <= tol
    left_bracket = np.zeros(theta.shape, dtype=bool)
    for _ in range(NEWTON_MAX_ITER):
        active = ~(converged | left_bracket)
        if not np.any(active):
            break
        slope = C_v + 4.0 * a * v[active] * theta[active] ** 3
        candidate = theta[active] - residual[active] / slope
        outside = (candidate < 0) | (candidate > upper[active]) | ~np.isfinite(candidate)
        idx = np.flatnonzero(active)
        left_bracket[idx[outside]] = True
        theta[idx[~outside]] = candidate[~outside]
        residual = C_v * theta + a * v * theta**4 - e
        converged = np.abs(residual) <= tol

    if np.any(left_bracket & ~converged):
        fallback = left_bracket & ~converged
        count = int(np.count_nonzero(fallback))
        logger.warning("Newton left the bracket in %d cell(s); finishing by bisection", count)
        record_newton_fallback(count)
        theta[fallback] = _bisect(C_v, a, v[fallback], e[fallback], upper[fallback], tol[fallback])
        residual = C_v * theta + a * v * theta**4 - e
        converged = np.abs(residual) <= tol

    if not np.all(converged):
        bad = int(np.flatnonzero(~converged)[0])
        raise TemperatureInversionError(
            f"temperature inversion did not converge in {NEWTON_MAX_ITER} iterations "
            f"(entry {bad}, e={e[bad]!r}, v={v[bad]!r})"
        )
    return _out(theta.reshape(shape))


def _bisect(
    C_v: float, a: float, v: np.ndarray, e: np.ndarray, upper: np.ndarray, tol: np.ndarray
) -> np.ndarray:
    lo = np.zeros_like(e)
    hi = upper.copy()
    mid = 0.5 * (lo + hi)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        residual = C_v * mid + a * v * mid**4 - e
        if np.all(np.abs(residual) <= tol):
            break
        above = residual > 0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return mid
