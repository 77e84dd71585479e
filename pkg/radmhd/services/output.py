"""CSV and text writers. Every float is written with 17 significant digits so
that reading a file back reproduces the doubles exactly."""
import logging
from pathlib import Path
from typing import List, Sequence

import numpy as np

from ..core.config import settings
from ..models.diagnostics import TIMESERIES_COLUMNS, AuditReport, DiagSample
from ..models.mms import ConvergenceTable
from ..models.state import Grid, SimState
from .geometry_map import InterfaceTrack, eulerian_positions

logger = logging.getLogger(__name__)

INTERFACE_COLUMNS = ["t", "a", "b", "width", "width_over_1pt"]
CELL_COLUMNS = ["y_center", "v", "theta", "b2", "b3"]
NODE_COLUMNS = ["y_node", "x_eulerian", "u", "w2", "w3"]
CONVERGENCE_COLUMNS = ["level", "N", "field", "L2_error", "Linf_error", "observed_order"]


def _fmt() -> str:
    return f"%.{settings.CSV_PRECISION}g"


def _write_table(path: Path, columns: Sequence[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.asarray(rows, dtype=float).reshape(-1, len(columns))
    np.savetxt(path, table, delimiter=",", header=",".join(columns), comments="", fmt=_fmt())
    logger.debug("wrote %d rows to %s", table.shape[0], path)
    return path


def write_timeseries(path: Path, series: List[DiagSample]) -> Path:
    return _write_table(path, TIMESERIES_COLUMNS, [sample.row() for sample in series])


def read_timeseries(path: Path) -> List[DiagSample]:
    """Load a timeseries.csv; files holding only the leading fixed columns are accepted."""
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
    unknown = [name for name in header if name not in TIMESERIES_COLUMNS]
    if unknown or header != TIMESERIES_COLUMNS[: len(header)]:
        raise ValueError(f"{path}: unexpected timeseries header {header}")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return [DiagSample(**dict(zip(header, (float(x) for x in row)))) for row in table]


def write_interfaces(path: Path, track: InterfaceTrack) -> Path:
    return _write_table(path, INTERFACE_COLUMNS, track.rows())


def write_snapshot(directory: Path, index: int, state: SimState, grid: Grid, a_left: float) -> List[Path]:
    """cells_NNNN.csv and nodes_NNNN.csv for one output time."""
    cells = np.column_stack([grid.y_cells, state.v, state.theta, state.b[:, 0], state.b[:, 1]])
    nodes = np.column_stack(
        [grid.y_nodes, eulerian_positions(state, a_left), state.u, state.w[:, 0], state.w[:, 1]]
    )
    return [
        _write_table(directory / f"cells_{index:04d}.csv", CELL_COLUMNS, cells),
        _write_table(directory / f"nodes_{index:04d}.csv", NODE_COLUMNS, nodes),
    ]


def write_audit(path: Path, report: AuditReport) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.render(), encoding="utf-8")
    return path


def write_convergence(path: Path, table: ConvergenceTable) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = _fmt()
    lines = [",".join(CONVERGENCE_COLUMNS)]
    for row in table.rows:
        order = "" if row.observed_order is None else fmt % row.observed_order
        lines.append(
            f"{row.level},{row.N},{row.field},{fmt % row.L2_error},{fmt % row.Linf_error},{order}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
