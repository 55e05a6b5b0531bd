from typing import Any, List, Mapping, Optional
import numpy as np
import pandas as pd
from pydantic import Field

from macauthpy.constants import (
    DEFAULT_INITIAL_STEP,
    DEFAULT_MAX_ROUNDS,
    DEFAULT_MIN_STEP,
    DEFAULT_RESTARTS,
    FEASIBILITY_TOL,
)
from macauthpy.models import CouplingMode, JSONSerializableBaseModel, StrictConfigModel
from macauthpy.models.channel_models import EncoderSummary

Tensor3 = List[List[List[float]]]


class FeasibilityReport(JSONSerializableBaseModel):
    """Outcome of the simulatability LP.

    residual is the minimum total L1 violation of the attacked-equals-clean condition over
    the mode's constraint polytope; witness J[u'][u][v] is present iff feasible.
    """

    feasible: bool
    residual: float
    witness: Optional[Tensor3] = None
    mode: CouplingMode
    tolerance: float = FEASIBILITY_TOL

    def witness_array(self) -> Optional[np.ndarray]:
        if self.witness is None:
            return None
        return np.array(self.witness, dtype=float)

    def to_csv_rows(self) -> List[Mapping[str, Any]]:
        return [{"mode": self.mode, "feasible": self.feasible, "residual": self.residual}]


class MembershipVerdict(JSONSerializableBaseModel):
    in_u_plus: bool
    decision_mode: CouplingMode = CouplingMode.PRODUCT_COUPLING
    decision_residual: float
    rate: float = 0.0
    # +inf when the decision LP is infeasible; None when not computed (search traces)
    min_confusion_info: Optional[float] = None
    rate_threshold_note: Optional[float] = None
    safe_at_rate: Optional[bool] = None

    def to_csv_rows(self) -> List[Mapping[str, Any]]:
        return [self.to_json()]


class AttackKernel(JSONSerializableBaseModel):
    """Per-symbol attack: codeword_kernel[u'][u][v] = P(v | u', u) and
    input_kernel[x'][x][v] = P(v | x', x)."""

    u_size: int
    x_size: int
    v_size: int
    silence_index: int
    source_mode: CouplingMode
    codeword_kernel: Tensor3
    input_kernel: Tensor3

    def codeword_array(self) -> np.ndarray:
        return np.array(self.codeword_kernel, dtype=float)

    def input_array(self) -> np.ndarray:
        return np.array(self.input_kernel, dtype=float)

    def to_csv_rows(self) -> List[Mapping[str, Any]]:
        rows: List[Mapping[str, Any]] = []
        for level, kernel in (("codeword", self.codeword_kernel), ("input", self.input_kernel)):
            for target, block in enumerate(kernel):
                for own, dist in enumerate(block):
                    row = {"level": level, "target_symbol": target, "own_symbol": own}
                    row.update({f"p_v{v}": p for v, p in enumerate(dist)})
                    rows.append(row)
        return rows


class RateSearchConfig(StrictConfigModel):
    restarts: int = Field(DEFAULT_RESTARTS, ge=1)
    seed: int = 0
    initial_step: float = Field(DEFAULT_INITIAL_STEP, gt=0)
    min_step: float = Field(DEFAULT_MIN_STEP, gt=0)
    max_rounds: int = Field(DEFAULT_MAX_ROUNDS, ge=1)


class TraceRecord(JSONSerializableBaseModel):
    restart: int
    u_size: int
    encoder: EncoderSummary
    rate: float
    in_u_plus: bool
    decision_residual: float


class RateBoundResult(JSONSerializableBaseModel):
    best_rate: float
    best_encoder: Optional[EncoderSummary] = None
    verdicts: Optional[MembershipVerdict] = None
    search_trace: List[TraceRecord] = []
    clean_capacity: float

    def to_dataframe(self) -> pd.DataFrame:
        rows = [
            {
                "restart": rec.restart,
                "u_size": rec.u_size,
                "rate": rec.rate,
                "in_u_plus": rec.in_u_plus,
                "decision_residual": rec.decision_residual,
            }
            for rec in self.search_trace
        ]
        return pd.DataFrame(rows, columns=["restart", "u_size", "rate", "in_u_plus", "decision_residual"])

    def to_csv_rows(self) -> List[Mapping[str, Any]]:
        return self.to_dataframe().to_dict(orient="records")
