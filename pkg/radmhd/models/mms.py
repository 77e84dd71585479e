from pydantic import BaseModel
from typing import Dict, List, Optional

MMS_FIELDS = ["v", "u", "theta", "w2", "w3", "b2", "b3"]

# minimum observed L2 orders; fields with identically zero error are skipped
DEFAULT_ORDER_THRESHOLDS: Dict[str, float] = {
    "v": 1.8,
    "u": 1.8,
    "theta": 1.8,
    "w2": 1.5,
    "w3": 1.5,
    "b2": 1.5,
    "b3": 1.5,
}


class ErrorRow(BaseModel):
    level: int
    N: int
    field: str
    L2_error: float
    Linf_error: float
    observed_order: Optional[float] = None


class ConvergenceTable(BaseModel):
    case: str
    t_final: float
    rows: List[ErrorRow]

    def orders(self, field: str) -> List[float]:
        return [
            row.observed_order
            for row in self.rows
            if row.field == field and row.observed_order is not None
        ]

    def failures(self, thresholds: Optional[Dict[str, float]] = None) -> List[ErrorRow]:
        thresholds = thresholds or DEFAULT_ORDER_THRESHOLDS
        return [
            row
            for row in self.rows
            if row.observed_order is not None
            and row.field in thresholds
            and row.observed_order < thresholds[row.field]
        ]
