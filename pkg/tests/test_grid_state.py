import pytest
import numpy as np

from radmhd.core.errors import ConfigError
from radmhd.models.profiles import (
    CompositeProfile,
    MagnetoPulseProfile,
    ThermalBumpProfile,
    UniformProfile,
    VelocityPushProfile,
)
from radmhd.models.state import Grid
from radmhd.services.grid_state import make_initial_state, validate
from radmhd.services.spatial_ops import FREE_BOUNDARY


def test_grid_layout():
    grid = Grid(8)
    assert grid.dy == 0.125
    assert grid.y_nodes[0] == 0.0 and grid.y_nodes[-1] == 1.0
    assert grid.y_cells[0] == pytest.approx(0.0625)
    assert grid.node_mass.sum() == pytest.approx(1.0)
    assert grid.node_mass[0] == grid.node_mass[-1] == 0.0625


@pytest.mark.parametrize("n", [4, 7, 10, 49, 256, 1000, 12345])
def test_total_mass_is_one_for_every_resolution(n):
    grid = Grid(n)
    assert np.sum(np.full(n, grid.dy)) == pytest.approx(1.0, abs=1e-13)
    assert np.sum(grid.node_mass) == pytest.approx(1.0, abs=1e-13)
    assert grid.y_nodes[-1] == pytest.approx(1.0, abs=1e-15)


def test_grid_rejects_too_few_cells():
    with pytest.raises(ValueError, match="n_cells must be >= 4"):
        Grid(3)


def test_uniform_profile(params):
    state = make_initial_state(Grid(16), UniformProfile(v=1.0, theta=1.0), params)
    assert np.all(state.v == 1.0)
    assert np.all(state.theta == 1.0)
    assert np.all(state.u == 0.0)
    assert np.all(state.w == 0.0)
    assert np.all(state.b == 0.0)
    assert np.allclose(state.e, 2.0)
    assert state.t == 0.0


def test_thermal_bump_profile(params):
    grid = Grid(64)
    state = make_initial_state(grid, ThermalBumpProfile(theta0=1.0, amp=0.5), params)
    assert np.allclose(state.theta, 1.0 + 0.5 * np.cos(np.pi * grid.y_cells))
    assert state.theta.min() > 0.5
    assert np.all(state.v == 1.0)


def test_magneto_pulse_profile(params):
    grid = Grid(32)
    state = make_initial_state(grid, MagnetoPulseProfile(b_amp=0.3), params)
    assert np.allclose(state.b[:, 0], 0.3 * np.sin(np.pi * grid.y_cells))
    assert np.all(state.b[:, 1] == 0.0)
    ghost_left, ghost_right = FREE_BOUNDARY.b_ghost(state)
    assert np.all(0.5 * (ghost_left + state.b[0]) == 0.0)
    assert np.all(0.5 * (ghost_right + state.b[-1]) == 0.0)


def test_velocity_push_pins_transverse_ends(params):
    grid = Grid(16)
    state = make_initial_state(grid, VelocityPushProfile(u_amp=0.2, w_amp=0.1), params)
    assert np.allclose(state.u, 0.2 * np.sin(np.pi * grid.y_nodes))
    assert np.all(state.w[[0, -1]] == 0.0)
    assert state.w[8, 0] == pytest.approx(0.1)


def test_composite_profile_superposes(params):
    grid = Grid(16)
    profile = CompositeProfile(
        components=[ThermalBumpProfile(), MagnetoPulseProfile(b_amp=0.2), VelocityPushProfile(u_amp=0.1)]
    )
    state = make_initial_state(grid, profile, params)
    assert np.allclose(state.theta, 1.0 + 0.5 * np.cos(np.pi * grid.y_cells))
    assert np.allclose(state.b[:, 0], 0.2 * np.sin(np.pi * grid.y_cells))
    assert np.allclose(state.u, 0.1 * np.sin(np.pi * grid.y_nodes))


def test_uniform_component_sets_the_background_of_a_bump(params):
    grid = Grid(16)
    profile = CompositeProfile(
        components=[UniformProfile(v=1.5, theta=2.0), ThermalBumpProfile(theta0=1.0, amp=0.5)]
    )
    state = make_initial_state(grid, profile, params)
    assert np.all(state.v == 1.5)
    np.testing.assert_allclose(state.theta, 2.0 + 0.5 * np.cos(np.pi * grid.y_cells), rtol=1e-15)
    assert state.theta.max() < 2.5


def test_bump_alone_and_in_a_composite_agree(params):
    grid = Grid(16)
    bump = ThermalBumpProfile(theta0=1.2, amp=0.3)
    alone = make_initial_state(grid, bump, params)
    combined = make_initial_state(grid, CompositeProfile(components=[bump, VelocityPushProfile()]), params)
    assert np.array_equal(alone.theta, combined.theta)
    assert np.array_equal(alone.v, combined.v)


def test_composite_rejects_competing_backgrounds():
    with pytest.raises(ValueError, match="at most one uniform component"):
        CompositeProfile(components=[UniformProfile(), UniformProfile(theta=2.0)])
    with pytest.raises(ValueError, match="must share theta0"):
        CompositeProfile(components=[ThermalBumpProfile(theta0=1.0), ThermalBumpProfile(theta0=2.0)])
    # a uniform background makes the bumps' theta0 irrelevant
    CompositeProfile(
        components=[UniformProfile(), ThermalBumpProfile(theta0=1.0), ThermalBumpProfile(theta0=2.0)]
    )


def test_non_positive_initial_temperature_is_a_config_error(params):
    with pytest.raises(ConfigError) as info:
        make_initial_state(Grid(16), ThermalBumpProfile(theta0=1.0, amp=2.0), params)
    assert info.value.issues[0].path == "init"


def test_validate_uniform_state(rest_state):
    assert validate(rest_state) == []


def test_validate_negative_volume(rest_state):
    v = rest_state.v.copy()
    v[3] = -0.1
    violations = validate(rest_state.evolve(v=v))
    assert len(violations) == 1
    assert violations[0].field == "v"
    assert violations[0].index == 3


def test_validate_boundary_transverse_velocity(rest_state):
    w = rest_state.w.copy()
    w[0, 0] = 1e-9
    violations = validate(rest_state.evolve(w=w))
    assert len(violations) == 1
    assert "w(0)=0" in violations[0].message
