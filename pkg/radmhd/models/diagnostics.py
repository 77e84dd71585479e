from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, List, Optional

# Fixed column order of timeseries.csv; everything after uy_max is a supplementary monitor.
TIMESERIES_COLUMNS = [
    "t",
    "E_total",
    "S_entropy",
    "U_func",
    "V_rate",
    "V_cum",
    "L_width",
    "X_cum",
    "Y_now",
    "Z_now",
    "rho_min",
    "rho_max",
    "theta_min",
    "theta_max",
    "theta4_int",
    "b2_int",
    "uy_max",
    "theta_q4_max",
    "theta_q4_cum",
    "b_inf2_cum",
    "theta8_int",
    "rho_y_l2",
    "vtheta3_int",
    "wyy2_cum",
    "byy2_cum",
    "b_by2_cum",
    "b8_cum",
    "theta_vy2_cum",
    "uy4_cum",
    "uy_L4",
]


class DiagSample(BaseModel):
    """Monitored functionals at one instant."""

    model_config = ConfigDict(frozen=True)

    t: float
    E_total: float
    S_entropy: float
    U_func: float
    V_rate: float
    V_cum: float
    L_width: float
    X_cum: float
    Y_now: float
    Z_now: float
    rho_min: float
    rho_max: float
    theta_min: float
    theta_max: float
    theta4_int: float
    b2_int: float
    uy_max: float
    theta_q4_max: float = 0.0
    theta_q4_cum: float = 0.0
    b_inf2_cum: float = 0.0
    theta8_int: float = 0.0
    rho_y_l2: float = 0.0
    vtheta3_int: float = 0.0
    wyy2_cum: float = 0.0
    byy2_cum: float = 0.0
    b_by2_cum: float = 0.0
    b8_cum: float = 0.0
    theta_vy2_cum: float = 0.0
    uy4_cum: float = 0.0
    uy_L4: float = 0.0
    # instantaneous integrands carried for the time accumulation, not serialized
    rates: Dict[str, float] = Field(default_factory=dict, exclude=True)

    def row(self) -> List[float]:
        return [getattr(self, column) for column in TIMESERIES_COLUMNS]


class AuditTolerances(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    energy: float = Field(default=1e-3, gt=0.0, description="Relative drift bound on E_total")
    entropy_slack: float = Field(
        default=1e-6, ge=0.0, description="Allowed entropy decrease per unit time"
    )


class AuditCheck(BaseModel):
    name: str
    passed: bool
    value: float
    detail: str = ""
    informational: bool = False


class AuditReport(BaseModel):
    checks: List[AuditCheck]
    n_samples: int
    t_final: float

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> Optional[AuditCheck]:
        for item in self.checks:
            if item.name == name:
                return item
        return None

    def render(self) -> str:
        lines = [f"audit samples={self.n_samples} t_final={self.t_final:.17g}"]
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            kind = " (info)" if check.informational else ""
            line = f"{check.name}: {status}{kind} value={check.value:.17g}"
            if check.detail:
                line += f" {check.detail}"
            lines.append(line)
        lines.append(f"verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"
