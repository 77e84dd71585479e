import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set

import numpy as np

from ..core.config import settings
from ..core.errors import SolverCorruptionError
from ..core.metrics import write_metrics
from ..models.diagnostics import AuditReport, DiagSample
from ..models.run_config import RunConfig
from ..models.state import Grid, SimState
from .diagnostics import DiagnosticsMonitor, check_estimates
from .geometry_map import InterfaceTrack, advance_interfaces
from .grid_state import make_initial_state, validate
from .output import write_audit, write_interfaces, write_snapshot, write_timeseries
from .spatial_ops import FREE_BOUNDARY, boundary_residuals
from .stepper import Stepper

logger = logging.getLogger(__name__)

# ghost-average of b at the walls is the only residual not zero by construction
BOUNDARY_RESIDUAL_TOL = 1e-12


def output_times(t_end: float, interval: float) -> List[float]:
    count = int(np.floor(t_end / interval + 1e-9))
    times = [k * interval for k in range(1, count + 1) if k * interval < t_end - 1e-9 * interval]
    return times + [t_end]


@dataclass
class RunResult:
    final_state: SimState
    series: List[DiagSample]
    track: InterfaceTrack
    report: AuditReport
    width_mismatch: float
    paths: Dict[str, Path] = field(default_factory=dict)


class RunObserver:
    """Checks every accepted step and collects everything the run writes."""

    def __init__(self, config: RunConfig, grid: Grid, initial: SimState, snapshot_dir: Optional[Path]):
        self.config = config
        self.grid = grid
        self.monitor = DiagnosticsMonitor(config.physics, grid)
        self.track = InterfaceTrack.starting_at(initial)
        self.sample_times: Set[float] = {initial.t, *output_times(config.time.t_end, config.time.sample_interval)}
        self.snapshot_times: Set[float] = set()
        if snapshot_dir is not None:
            self.snapshot_times = {
                initial.t,
                *output_times(config.time.t_end, config.output.snapshot_interval),
            }
        self.snapshot_dir = snapshot_dir
        self.snapshots = 0
        self.width_mismatch = 0.0

    @property
    def stops(self) -> List[float]:
        return sorted(self.sample_times | self.snapshot_times)

    def on_step(self, state: SimState, prev_state: SimState) -> None:
        violations = validate(state)
        if violations:
            raise SolverCorruptionError(f"invalid state after step: {violations[0]}", state.t)
        residuals = boundary_residuals(state, self.config.physics, self.grid, FREE_BOUNDARY)
        worst = max(residuals, key=residuals.get)
        if residuals[worst] > BOUNDARY_RESIDUAL_TOL:
            raise SolverCorruptionError(
                f"boundary residual {worst} = {residuals[worst]!r}", state.t
            )
        advance_interfaces(self.track, state, state.t - prev_state.t)
        self.monitor.on_step(state, prev_state)

    def on_sample(self, state: SimState) -> None:
        if state.t in self.sample_times:
            current = self.monitor.on_sample(state)
            self.track.record()
            self.width_mismatch = max(self.width_mismatch, abs(self.track.width_now - current.L_width))
        if state.t in self.snapshot_times:
            write_snapshot(self.snapshot_dir, self.snapshots, state, self.grid, self.track.a)
            self.snapshots += 1


class SimulationService:
    """Runs one RunConfig end to end. Nothing is written if the run aborts."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.grid = Grid(config.grid.n_cells, config.grid.conductivity_mean)
        self.stepper = Stepper(config.physics, self.grid, config.stepper)

    def run(self, out_dir: Optional[Path] = None) -> RunResult:
        config = self.config
        out_dir = Path(out_dir if out_dir is not None else config.output.directory)
        initial = make_initial_state(self.grid, config.init, config.physics)
        snapshot_dir = out_dir / "snapshots" if config.output.write_snapshots else None
        # snapshots are staged and only kept when the run completes
        staging = out_dir / ".snapshots.partial" if snapshot_dir is not None else None
        observer = RunObserver(config, self.grid, initial, staging)

        logger.info(
            "run started: N=%d mode=%s t_end=%g init=%s",
            self.grid.n_cells,
            config.stepper.mode.value,
            config.time.t_end,
            config.init.kind,
        )
        try:
            final = self.stepper.advance_to(
                initial, config.time.t_end, observer=observer, sample_times=observer.stops
            )
        except Exception:
            if staging is not None and staging.exists():
                for path in staging.iterdir():
                    path.unlink()
                staging.rmdir()
            raise

        report = check_estimates(observer.monitor.series, config.audit)
        paths = {
            "timeseries": write_timeseries(out_dir / "timeseries.csv", observer.monitor.series),
            "interfaces": write_interfaces(out_dir / "interfaces.csv", observer.track),
            "audit": write_audit(out_dir / "audit.txt", report),
            "metrics": write_metrics(out_dir / settings.METRICS_FILENAME),
        }
        if staging is not None:
            if snapshot_dir.exists():
                for path in snapshot_dir.iterdir():
                    path.unlink()
                snapshot_dir.rmdir()
            staging.rename(snapshot_dir)
            paths["snapshots"] = snapshot_dir

        logger.info(
            "run finished: t=%.6g samples=%d audit=%s width mismatch=%.3e",
            final.t,
            len(observer.monitor.series),
            "PASS" if report.passed else "FAIL",
            observer.width_mismatch,
        )
        return RunResult(
            final_state=final,
            series=observer.monitor.series,
            track=observer.track,
            report=report,
            width_mismatch=observer.width_mismatch,
            paths=paths,
        )
