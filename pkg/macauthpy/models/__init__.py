"""models folder."""
from pydantic import BaseModel, ConfigDict
from typing import Mapping, Any, List
from enum import Enum


class JSONSerializableBaseModel(BaseModel):
    model_config = ConfigDict(
        use_enum_values=True, populate_by_name=True, validate_default=True
    )

    def to_json(self) -> Mapping[str, Any]:
        return self.model_dump(by_alias=True)


class StrictConfigModel(JSONSerializableBaseModel):
    """Config blocks reject unknown keys."""

    model_config = ConfigDict(
        use_enum_values=True,
        populate_by_name=True,
        validate_default=True,
        extra="forbid",
    )


class ErrorMessage(JSONSerializableBaseModel):
    message: str
    errors: List[str] = []


class CouplingMode(str, Enum):
    GENERAL = "general"
    PRODUCT_COUPLING = "product_coupling"


class AttackKind(str, Enum):
    SILENT = "silent"
    IID_SYMBOL = "iid_symbol"
    CODEWORD_AWARE = "codeword_aware"
    INPUT_AWARE = "input_aware"


class TargetPolicy(str, Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"


class Command(str, Enum):
    ANALYZE = "analyze"
    RATE_BOUND = "rate-bound"
    SIMULATE = "simulate"
    SYNTHESIZE_ATTACK = "synthesize-attack"
    REPRODUCE_EXAMPLE = "reproduce-paper-example"


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
