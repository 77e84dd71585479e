import pytest
import numpy as np

from radmhd.core.errors import PositivityError, TimeStepCollapseError
from radmhd.models.physics import PhysParams
from radmhd.models.profiles import ThermalBumpProfile, VelocityPushProfile
from radmhd.models.state import Grid, SimState
from radmhd.models.stepping import StepControl, StepMode
from radmhd.services.grid_state import make_initial_state
from radmhd.services.physics import eos_derivatives, internal_energy, pressure
from radmhd.services.spatial_ops import FreeBoundaryClosure
from radmhd.services.stepper import Stepper


class _ZeroFaceForce(FreeBoundaryClosure):
    """Face stress equal to the adjacent cell stress, so the faces feel no net force."""

    def face_stress(self, state, sigma):
        return float(sigma[0]), float(sigma[-1])


def _smooth_state(params: PhysParams, n: int) -> SimState:
    grid = Grid(n)
    yc, yn = grid.y_cells, grid.y_nodes
    v = 1.0 + 0.1 * np.sin(2 * np.pi * yc)
    theta = 1.0 + 0.2 * np.cos(np.pi * yc)
    w = np.zeros((n + 1, 2))
    w[:, 0] = 0.05 * np.sin(np.pi * yn)
    w[[0, -1]] = 0.0
    b = np.zeros((n, 2))
    b[:, 0] = 0.1 * np.sin(np.pi * yc)
    return SimState(
        t=0.0,
        v=v,
        theta=theta,
        e=np.asarray(internal_energy(params, v, theta)),
        b=b,
        u=0.05 * np.cos(np.pi * yn),
        w=w,
    )


def _euler(stepper: Stepper, state: SimState, dt: float) -> SimState:
    return stepper._stage(state, stepper.rhs(state), dt, state.t + dt)


def test_explicit_stable_dt_closed_form(rest_state, params, grid):
    control = StepControl(cfl=0.4)
    dt = Stepper(params, grid, control).stable_dt(rest_state)
    e_theta = params.C_v + 4.0 * params.a
    assert dt == pytest.approx(0.4 * grid.dy**2 / (2.0 * max(1.0, 2.0 / e_theta)))


def test_doubling_resolution_quarters_explicit_dt(params):
    control = StepControl()
    dts = []
    for n in (32, 64):
        grid = Grid(n)
        state = make_initial_state(grid, ThermalBumpProfile(), params)
        dts.append(Stepper(params, grid, control).stable_dt(state))
    assert dts[1] == pytest.approx(dts[0] / 4.0)


def test_imex_stable_dt_at_rest(rest_state, params, grid):
    control = StepControl(mode=StepMode.IMEX, cfl=0.5, dt_max=1.0)
    p_theta, p_v, e_theta = eos_derivatives(params, 1.0, 1.0)
    c_eff = np.sqrt(abs(p_v) + p_theta**2 / e_theta)
    dt = Stepper(params, grid, control).stable_dt(rest_state)
    assert dt == pytest.approx(0.5 * grid.dy / c_eff)


def test_stable_dt_below_floor_aborts(rest_state, params, grid):
    control = StepControl(dt_min=0.5, dt_max=1.0)
    with pytest.raises(TimeStepCollapseError):
        Stepper(params, grid, control).stable_dt(rest_state)


def test_zero_dynamics_is_a_fixed_point(rest_state, params, grid):
    stepper = Stepper(params, grid, StepControl(), closure=_ZeroFaceForce())
    new = stepper.step_explicit_rk2(rest_state, 1e-4)
    assert np.allclose(new.v, rest_state.v, rtol=0.0, atol=1e-15)
    assert np.allclose(new.theta, rest_state.theta, rtol=0.0, atol=1e-12)
    assert np.all(new.u == 0.0)
    assert np.all(new.w == 0.0)
    assert np.all(new.b == 0.0)


def test_rest_state_moves_only_boundary_velocities(rest_state, params, grid):
    dt = 1e-6
    new = Stepper(params, grid, StepControl()).step_explicit_rk2(rest_state, dt)
    p = pressure(params, 1.0, 1.0)
    assert new.u[0] == pytest.approx(-2.0 * p * dt / grid.dy, rel=1e-3)
    assert new.u[-1] == pytest.approx(2.0 * p * dt / grid.dy, rel=1e-3)
    assert np.max(np.abs(new.u[1:-1])) < 1e-3 * abs(new.u[0])
    assert new.t == dt


def test_rk2_local_error_is_third_order(params):
    stepper = Stepper(params, Grid(32), StepControl())
    state = _smooth_state(params, 32)

    def defect(dt):
        whole = stepper.step_explicit_rk2(state, dt)
        half = stepper.step_explicit_rk2(stepper.step_explicit_rk2(state, dt / 2), dt / 2)
        return np.max(np.abs(whole.u - half.u))

    ratio = defect(2e-5) / defect(1e-5)
    assert ratio > 6.0


def test_explicit_step_conserves_momentum(random_state, params):
    grid = Grid(16)
    state = random_state(16, seed=4)
    stepper = Stepper(params, grid, StepControl())
    new = stepper.step_explicit_rk2(state, 0.5 * stepper.stable_dt(state))
    before = np.sum(grid.node_mass * state.u)
    after = np.sum(grid.node_mass * new.u)
    assert after == pytest.approx(before, abs=1e-14)


def test_explicit_step_records_face_velocity(random_state, params):
    grid = Grid(16)
    state = random_state(16, seed=8)
    stepper = Stepper(params, grid, StepControl())
    dt = 0.5 * stepper.stable_dt(state)
    new = stepper.step_explicit_rk2(state, dt)
    left, right = new.face_velocity
    assert np.sum(new.v - state.v) * grid.dy == pytest.approx(dt * (right - left), abs=1e-15)


def test_compression_beyond_resolution_aborts(params):
    grid = Grid(8)
    state = make_initial_state(grid, VelocityPushProfile(u_amp=-20.0), params)
    stepper = Stepper(params, grid, StepControl())
    with pytest.raises(PositivityError) as info:
        stepper.step_explicit_rk2(state, 0.05)
    assert info.value.field == "v"


def test_imex_requires_free_closure(rest_state, params, grid, mocker):
    closure = mocker.Mock()
    closure.pinned_u_rate.return_value = (0.0, 0.0)
    stepper = Stepper(params, grid, StepControl(mode=StepMode.IMEX), closure=closure)
    with pytest.raises(ValueError, match="free-boundary"):
        stepper.step_imex(rest_state, 1e-3)


def test_imex_matches_dense_backward_euler_heat_solve():
    params = PhysParams(a=0.0, q=0.0, kappa1=1.0, kappa2=1.0)
    n, dt = 16, 1e-3
    grid = Grid(n)
    state = make_initial_state(grid, ThermalBumpProfile(theta0=1.0, amp=0.5), params)
    new = Stepper(params, grid, StepControl(mode=StepMode.IMEX)).step_imex(state, dt)

    g = 2.0 / grid.dy**2  # kappa / v on every interface
    matrix = np.diag(np.full(n, params.C_v / dt))
    for i in range(n - 1):
        matrix[i, i] += g
        matrix[i + 1, i + 1] += g
        matrix[i, i + 1] -= g
        matrix[i + 1, i] -= g
    expected = np.linalg.solve(matrix, params.C_v / dt * state.theta)
    assert np.allclose(new.theta, expected, rtol=0.0, atol=1e-12)
    assert np.all(new.v == state.v)


def test_imex_leaves_constant_temperature_unchanged(rest_state, params, grid):
    control = StepControl(mode=StepMode.IMEX, picard_sweeps=2)
    new = Stepper(params, grid, control).step_imex(rest_state, 1e-3)
    assert np.allclose(new.theta, 1.0, rtol=0.0, atol=1e-12)
    assert np.all(new.b == 0.0)
    assert np.all(new.w == 0.0)


def test_imex_agrees_with_euler_to_second_order_in_dt(params):
    n = 32
    stepper = Stepper(params, Grid(n), StepControl(mode=StepMode.IMEX))
    state = _smooth_state(params, n)

    def gap(dt):
        imex, euler = stepper.step_imex(state, dt), _euler(stepper, state, dt)
        return max(
            np.max(np.abs(imex.v - euler.v)),
            np.max(np.abs(imex.u - euler.u)),
            np.max(np.abs(imex.theta - euler.theta)),
            np.max(np.abs(imex.w - euler.w)),
            np.max(np.abs(imex.b - euler.b)),
        )

    ratio = gap(1e-6) / gap(5e-7)
    assert 3.0 < ratio < 5.0


def test_advance_to_current_time_is_identity(rest_state, params, grid, mocker):
    observer = mocker.Mock()
    result = Stepper(params, grid, StepControl()).advance_to(rest_state, rest_state.t, observer=observer)
    assert result is rest_state
    observer.on_sample.assert_called_once_with(rest_state)
    observer.on_step.assert_not_called()


def test_advance_to_lands_on_sample_times(params, mocker):
    grid = Grid(8)
    state = make_initial_state(grid, ThermalBumpProfile(), params)
    observer = mocker.Mock()
    final = Stepper(params, grid, StepControl(dt_max=0.003)).advance_to(
        state, 0.02, observer=observer, sample_times=[0.01, 0.5]
    )
    assert final.t == 0.02
    sampled = [call.args[0].t for call in observer.on_sample.call_args_list]
    assert sampled == [0.0, 0.01, 0.02]
    steps = observer.on_step.call_args_list
    assert steps[0].args[1] is state
    for earlier, later in zip(steps, steps[1:]):
        assert later.args[1] is earlier.args[0]


def test_chained_advance_is_bitwise_identical(params):
    grid = Grid(8)
    state = make_initial_state(grid, ThermalBumpProfile(), params)
    stepper = Stepper(params, grid, StepControl(dt_max=2.0**-12))
    once = stepper.advance_to(state, 2.0**-6)
    twice = stepper.advance_to(stepper.advance_to(state, 2.0**-7), 2.0**-6)
    for name in ("v", "theta", "e", "b", "u", "w"):
        assert np.array_equal(getattr(once, name), getattr(twice, name))


def test_zero_field_run_is_bitwise_pure_navier_stokes(params):
    grid = Grid(16)
    state = make_initial_state(grid, VelocityPushProfile(u_amp=0.1), params)
    full = Stepper(params, grid, StepControl()).advance_to(state, 0.01)
    pure = Stepper(params, grid, StepControl(), transverse=False).advance_to(state, 0.01)
    assert np.all(full.b == 0.0)
    assert np.all(full.w == 0.0)
    for name in ("v", "u", "theta"):
        assert np.array_equal(getattr(full, name), getattr(pure, name))


def test_abort_records_time_and_metric(params, mocker):
    record_abort = mocker.patch("radmhd.services.stepper.record_abort")
    grid = Grid(8)
    state = make_initial_state(grid, VelocityPushProfile(u_amp=-20.0), params)
    control = StepControl(cfl=1.0, dt_max=0.05)
    weak = PhysParams(**{"lambda": 1e-3}, mu=1e-3, nu=1e-3, kappa1=1e-3, kappa2=1e-3, q=0.0)
    with pytest.raises(PositivityError) as info:
        Stepper(weak, grid, control).advance_to(state, 0.5)
    assert info.value.t == 0.0
    assert "t=0" in str(info.value)
    record_abort.assert_called_once_with("PositivityError")


@pytest.mark.slow
def test_explicit_and_imex_agree_at_matched_dt():
    params = PhysParams()
    grid = Grid(128)
    state = make_initial_state(grid, ThermalBumpProfile(theta0=1.0, amp=0.5), params)
    explicit = Stepper(params, grid, StepControl(cfl=1.0, dt_max=1e-5, dt_min=1e-9)).advance_to(state, 0.1)
    imex = Stepper(
        params, grid, StepControl(mode=StepMode.IMEX, cfl=1.0, dt_max=1e-5, dt_min=1e-9)
    ).advance_to(state, 0.1)
    for name in ("v", "u", "theta", "w", "b"):
        assert np.max(np.abs(getattr(explicit, name) - getattr(imex, name))) <= 1e-4
