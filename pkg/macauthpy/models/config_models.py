from typing import Any, Dict, List, Optional
from pydantic import Field, field_validator, model_validator

from macauthpy.constants import DEFAULT_SUITE_SEED, DEFAULT_SUITE_TRIALS, MAX_CODEWORDS
from macauthpy.models import (
    Command,
    CouplingMode,
    ErrorMessage,
    JSONSerializableBaseModel,
    StrictConfigModel,
)
from macauthpy.models.analysis_models import RateSearchConfig
from macauthpy.models.channel_models import ChannelSpecModel, EncoderSpecModel
from macauthpy.models.sim_models import AttackStrategy


class AnalyzeBlock(StrictConfigModel):
    mode: CouplingMode = CouplingMode.PRODUCT_COUPLING
    rate: float = Field(0.0, ge=0.0)


class RateBoundBlock(StrictConfigModel):
    u_size_max: int = Field(2, ge=1)
    search: RateSearchConfig = Field(default_factory=RateSearchConfig)


class SimulateBlock(StrictConfigModel):
    """One simulation cell per (n, rate, attack) combination."""

    n: List[int]
    rate: List[float]
    trials: int = Field(ge=1)
    seed: int
    delta_override: Optional[float] = Field(None, gt=0.0)
    attacks: List[AttackStrategy] = Field(default_factory=lambda: [AttackStrategy()])
    max_codewords: int = Field(MAX_CODEWORDS, ge=2)

    @field_validator("n", "rate", mode="before")
    @classmethod
    def _listify(cls, value: Any) -> Any:
        return value if isinstance(value, (list, tuple)) else [value]

    @model_validator(mode="after")
    def _validate_grid(self) -> "SimulateBlock":
        if not self.n or not self.rate:
            raise ValueError("n and rate need at least one value each")
        if any(n < 1 for n in self.n):
            raise ValueError(f"n: block lengths must be positive, got {self.n}")
        if any(rate <= 0 for rate in self.rate):
            raise ValueError(f"rate: rates must be positive, got {self.rate}")
        if not self.attacks:
            raise ValueError("attacks: at least one strategy is required")
        return self


class ReproduceBlock(StrictConfigModel):
    """Worked-example suite settings; the suite ignores the config's channel and encoder."""

    trials: int = Field(DEFAULT_SUITE_TRIALS, ge=1)
    seed: int = DEFAULT_SUITE_SEED


class ExperimentConfig(StrictConfigModel):
    name: Optional[str] = None
    channel: ChannelSpecModel
    encoder: Optional[EncoderSpecModel] = None
    analyze: AnalyzeBlock = Field(default_factory=AnalyzeBlock)
    rate_bound: RateBoundBlock = Field(default_factory=RateBoundBlock)
    simulate: Optional[SimulateBlock] = None
    reproduce: ReproduceBlock = Field(default_factory=ReproduceBlock)

    @model_validator(mode="after")
    def _validate_encoder_fits(self) -> "ExperimentConfig":
        if self.encoder is not None and len(self.encoder.px_given_u) != self.channel.x_size:
            raise ValueError(
                f"encoder.px_given_u: {len(self.encoder.px_given_u)} rows, "
                f"channel has x_size {self.channel.x_size}"
            )
        return self

    @property
    def seeds(self) -> List[int]:
        seeds = [self.rate_bound.search.seed]
        if self.simulate is not None:
            seeds.append(self.simulate.seed)
        return seeds

    def seeds_for(self, command: Command) -> List[int]:
        if Command(command) == Command.REPRODUCE_EXAMPLE:
            return [self.reproduce.seed]
        return self.seeds


class OutputRecord(JSONSerializableBaseModel):
    """Everything needed to re-run a command and audit its results."""

    command: str
    config_hash: str
    library_version: str
    seeds: List[int] = []
    config: Dict[str, Any]
    results: Optional[Dict[str, Any]] = None
    passed: Optional[bool] = None
    started_at: str
    duration_seconds: float = 0.0
    error: Optional[ErrorMessage] = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.passed is not False


class FixtureCheck(JSONSerializableBaseModel):
    name: str
    passed: bool
    details: Dict[str, Any] = {}


class SuiteReport(JSONSerializableBaseModel):
    trials: Optional[int] = None
    seed: Optional[int] = None
    checks: List[FixtureCheck] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_csv_rows(self) -> List[Dict[str, Any]]:
        return [{"check": check.name, "passed": check.passed} for check in self.checks]
