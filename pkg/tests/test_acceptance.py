"""Desk-scale acceptance battery over the bundled configs (``pytest -m slow``)."""
import math
from pathlib import Path

import pytest
import numpy as np

from radmhd.services.config_parser import load_config
from radmhd.services.grid_state import make_initial_state
from radmhd.services.simulation import SimulationService
from radmhd.services.stepper import Stepper
from radmhd.models.state import Grid

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
COMPLETING = [
    "thermal_bump",
    "uniform_hot_gas",
    "constant_conductivity",
    "magneto_pulse",
    "zero_field",
    "imex_stiff",
]

pytestmark = pytest.mark.slow


def _run(name, tmp_path, **grid):
    config = load_config(CONFIG_DIR / f"{name}.yaml")
    if grid:
        config = config.model_copy(update={"grid": config.grid.model_copy(update=grid)})
    return SimulationService(config).run(tmp_path / name)


@pytest.mark.parametrize("name", COMPLETING)
def test_bundled_config_passes_audit(name, tmp_path):
    result = _run(name, tmp_path)
    assert result.report.passed, result.report.render()
    assert min(s.theta_min for s in result.series) > 0.0
    assert min(s.rho_min for s in result.series) > 0.0


@pytest.mark.parametrize("name", ["thermal_bump", "constant_conductivity"])
def test_energy_drift_shrinks_under_refinement(name, tmp_path):
    coarse = _run(name, tmp_path / "coarse")
    fine = _run(name, tmp_path / "fine", n_cells=512)
    drift_coarse = coarse.report.check("energy_conservation").value
    drift_fine = fine.report.check("energy_conservation").value
    assert drift_coarse <= 1e-3
    assert drift_fine * 3.0 <= drift_coarse


def test_entropy_residual_converges(tmp_path):
    residuals = [
        _run("thermal_bump", tmp_path / str(n), n_cells=n).report.check("entropy_production").value
        for n in (64, 128, 256)
    ]
    orders = [math.log2(a / b) for a, b in zip(residuals, residuals[1:])]
    assert min(orders) >= 1.5


@pytest.mark.parametrize("name", ["uniform_hot_gas", "constant_conductivity"])
def test_interface_expands_at_most_linearly(name, tmp_path):
    result = _run(name, tmp_path)
    width = np.array([row[3] for row in result.track.rows()])
    assert np.all(np.diff(width) > 0.0)
    assert result.width_mismatch <= 1e-10
    growth = result.report.check("interface_expansion")
    assert growth.passed
    t = np.array([s.t for s in result.series])
    integrated = np.array([s.L_width for s in result.series])
    assert np.all(integrated / (1.0 + t) <= growth.value)
    # the tracked faces agree with the integrated width up to the recorded mismatch
    tracked = width / (1.0 + np.array(result.track.t_samples))
    assert np.all(tracked <= growth.value * (1.0 + 1e-14) + result.width_mismatch)


def test_zero_field_stays_zero_and_matches_pure_navier_stokes(tmp_path):
    config = load_config(CONFIG_DIR / "zero_field.yaml")
    result = SimulationService(config).run(tmp_path)
    assert np.max(np.abs(result.final_state.b)) <= 1e-14
    assert np.max(np.abs(result.final_state.w)) <= 1e-14
    assert all(s.b2_int == 0.0 for s in result.series)

    grid = Grid(config.grid.n_cells, config.grid.conductivity_mean)
    initial = make_initial_state(grid, config.init, config.physics)
    pure = Stepper(config.physics, grid, config.stepper, transverse=False).advance_to(
        initial, config.time.t_end, sample_times=[s.t for s in result.series]
    )
    for name in ("v", "u", "theta"):
        assert np.array_equal(getattr(result.final_state, name), getattr(pure, name))
