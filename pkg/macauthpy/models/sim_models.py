from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional
import math
import numpy as np
from pydantic import Field, model_validator

from macauthpy.constants import CONFIDENCE_Z, CONFIG_STOCHASTIC_TOL, MAX_CODEWORDS
from macauthpy.errors import DimensionMismatchError, InvalidAttackError
from macauthpy.models import (
    AttackKind,
    JSONSerializableBaseModel,
    StrictConfigModel,
    TargetPolicy,
)
from macauthpy.models.analysis_models import Tensor3
from macauthpy.models.channel_models import EncoderSpec, MacChannel
from macauthpy.models.prob_models import Distribution, TypicalityParams


def message_count(n: int, rate: float) -> int:
    """floor(2^(n R)), guarding against n R landing just below an integer."""
    exponent = n * rate
    nearest = round(exponent)
    if abs(exponent - nearest) < 1e-9:
        exponent = nearest
    return int(math.floor(2.0**exponent))


class Outcome(str, Enum):
    CORRECT = "correct"
    WRONG_MESSAGE = "wrong_message"
    INTRUSION = "intrusion"


class AttackStrategy(StrictConfigModel):
    """Eve's per-trial behaviour.

    kernel is indexed [target symbol][own symbol][v]: u-level for codeword_aware,
    x-level for input_aware. When omitted for those kinds the runner synthesizes it.
    """

    kind: AttackKind = AttackKind.SILENT
    label: Optional[str] = None
    iid_dist: Optional[List[float]] = None
    kernel: Optional[Tensor3] = None
    target_policy: TargetPolicy = TargetPolicy.UNIFORM
    fixed_target: Optional[int] = None
    # per-position probability of using the kernel; silence otherwise
    activity: float = Field(1.0, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _validate_strategy(self) -> "AttackStrategy":
        if self.kind == AttackKind.IID_SYMBOL:
            if self.iid_dist is None:
                raise ValueError("iid_dist: required for iid_symbol attacks")
            dist = np.array(self.iid_dist, dtype=float)
            if np.any(dist < 0) or abs(dist.sum() - 1.0) > CONFIG_STOCHASTIC_TOL:
                raise ValueError(f"iid_dist: not a distribution (sum {float(dist.sum())!r})")
        if self.kernel is not None:
            kernel = np.array(self.kernel, dtype=float)
            if kernel.ndim != 3:
                raise ValueError("kernel: expected [target][own][v] nesting")
            sums = kernel.sum(axis=2)
            if np.any(kernel < 0) or np.any(np.abs(sums - 1.0) > CONFIG_STOCHASTIC_TOL):
                raise ValueError("kernel: every [target][own] row must be a distribution over V")
        if self.target_policy == TargetPolicy.FIXED:
            if self.fixed_target is None or self.fixed_target < 0:
                raise ValueError("fixed_target: required and nonnegative for the fixed policy")
        return self

    @property
    def name(self) -> str:
        return self.label or AttackKind(self.kind).value

    @property
    def is_silent(self) -> bool:
        return self.kind == AttackKind.SILENT

    def iid_distribution(self) -> Distribution:
        return Distribution.normalized(self.iid_dist)

    def kernel_array(self) -> Optional[np.ndarray]:
        if self.kernel is None:
            return None
        kernel = np.array(self.kernel, dtype=float)
        return kernel / kernel.sum(axis=2, keepdims=True)

    def check_target(self, m: int, num_messages: int) -> None:
        if self.target_policy != TargetPolicy.FIXED:
            return
        if self.fixed_target == m:
            raise InvalidAttackError(f"Eve must target a message other than the sent one ({m})")
        if self.fixed_target >= num_messages:
            raise InvalidAttackError(
                f"fixed target {self.fixed_target} outside the {num_messages}-message codebook"
            )


@dataclass(frozen=True, eq=False)
class Codebook:
    """words[m] is the codeword u^n(m)."""

    words: np.ndarray
    tp: TypicalityParams
    seed: int
    fallback_words: int = 0

    def __post_init__(self) -> None:
        words = np.array(self.words, dtype=np.int64)
        if words.ndim != 2 or words.shape[1] != self.tp.n:
            raise DimensionMismatchError(f"codebook words must have shape (M, {self.tp.n})")
        words.setflags(write=False)
        object.__setattr__(self, "words", words)

    @property
    def n(self) -> int:
        return self.tp.n

    @property
    def num_messages(self) -> int:
        return int(self.words.shape[0])

    @property
    def rate(self) -> float:
        return math.log2(self.num_messages) / self.n

    def word(self, m: int) -> np.ndarray:
        return self.words[m]


@dataclass(frozen=True, eq=False)
class TrialConfig:
    n: int
    rate: float
    trials: int
    seed: int
    tp: TypicalityParams
    encoder: EncoderSpec
    channel: MacChannel
    attack: AttackStrategy = field(default_factory=AttackStrategy)
    max_codewords: int = MAX_CODEWORDS

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.tp.n != self.n:
            raise ValueError(f"typicality block length {self.tp.n} differs from n = {self.n}")
        count = message_count(self.n, self.rate)
        if count < 2:
            raise ValueError(f"n = {self.n}, rate = {self.rate} gives {count} message(s); need 2")
        if count > self.max_codewords:
            raise ValueError(
                f"n = {self.n}, rate = {self.rate} needs {count} codewords, "
                f"limit is {self.max_codewords}"
            )
        self.encoder.check_against(self.channel)

    @property
    def num_messages(self) -> int:
        return message_count(self.n, self.rate)


@dataclass(frozen=True, eq=False)
class AttackTransmission:
    """Eve's v^n plus the message she aimed at (None for untargeted kinds)."""

    v_seq: np.ndarray
    silence_index: int
    target: Optional[int] = None

    @property
    def attacked(self) -> bool:
        return bool(np.any(self.v_seq != self.silence_index))


@dataclass
class TrialTally:
    """Outcome counts, split by whether Eve transmitted. merge is associative."""

    unattacked: Dict[Outcome, int] = field(
        default_factory=lambda: {outcome: 0 for outcome in Outcome}
    )
    attacked: Dict[Outcome, int] = field(
        default_factory=lambda: {outcome: 0 for outcome in Outcome}
    )
    target_hits: int = 0

    def record(self, attacked: bool, outcome: Outcome, target_hit: bool = False) -> None:
        bucket = self.attacked if attacked else self.unattacked
        bucket[outcome] += 1
        if attacked and target_hit:
            self.target_hits += 1

    def merge(self, other: "TrialTally") -> "TrialTally":
        return TrialTally(
            unattacked={o: self.unattacked[o] + other.unattacked[o] for o in Outcome},
            attacked={o: self.attacked[o] + other.attacked[o] for o in Outcome},
            target_hits=self.target_hits + other.target_hits,
        )


class OutcomeCounts(JSONSerializableBaseModel):
    correct: int = 0
    wrong_message: int = 0
    intrusion_declared: int = 0

    @property
    def total(self) -> int:
        return self.correct + self.wrong_message + self.intrusion_declared

    @classmethod
    def from_bucket(cls, bucket: Mapping[Outcome, int]) -> "OutcomeCounts":
        return cls(
            correct=bucket[Outcome.CORRECT],
            wrong_message=bucket[Outcome.WRONG_MESSAGE],
            intrusion_declared=bucket[Outcome.INTRUSION],
        )


def _rate_with_half_width(hits: int, total: int):
    if total == 0:
        return None, None
    p = hits / total
    return p, CONFIDENCE_Z * math.sqrt(p * (1.0 - p) / total)


class TrialReport(JSONSerializableBaseModel):
    """Monte Carlo estimate of the two error probabilities for one (n, rate, attack) cell.

    eps1 is over unattacked trials (intrusion counts as an error); eps2 is the
    wrong-message rate over attacked trials. Both are None when their bucket is empty.
    """

    n: int
    rate: float
    num_messages: int
    trials: int
    seed: int
    delta: float
    attack: str
    activity: float
    eps1_hat: Optional[float] = None
    eps1_half_width: Optional[float] = None
    eps2_hat: Optional[float] = None
    eps2_half_width: Optional[float] = None
    eve_success_rate: Optional[float] = None
    counts: OutcomeCounts
    unattacked: OutcomeCounts
    attacked: OutcomeCounts
    target_hits: int = 0
    codebook_fallback_words: int = 0
    codeword_test: str = "delta_typical_set"

    @classmethod
    def from_tally(
        cls,
        tally: TrialTally,
        cfg: TrialConfig,
        fallback_words: int = 0,
    ) -> "TrialReport":
        unattacked = OutcomeCounts.from_bucket(tally.unattacked)
        attacked = OutcomeCounts.from_bucket(tally.attacked)
        eps1, eps1_hw = _rate_with_half_width(
            unattacked.wrong_message + unattacked.intrusion_declared, unattacked.total
        )
        eps2, eps2_hw = _rate_with_half_width(attacked.wrong_message, attacked.total)
        return cls(
            n=cfg.n,
            rate=cfg.rate,
            num_messages=cfg.num_messages,
            trials=cfg.trials,
            seed=cfg.seed,
            delta=cfg.tp.delta,
            attack=cfg.attack.name,
            activity=cfg.attack.activity,
            eps1_hat=eps1,
            eps1_half_width=eps1_hw,
            eps2_hat=eps2,
            eps2_half_width=eps2_hw,
            eve_success_rate=(tally.target_hits / attacked.total) if attacked.total else None,
            counts=OutcomeCounts(
                correct=unattacked.correct + attacked.correct,
                wrong_message=unattacked.wrong_message + attacked.wrong_message,
                intrusion_declared=unattacked.intrusion_declared + attacked.intrusion_declared,
            ),
            unattacked=unattacked,
            attacked=attacked,
            target_hits=tally.target_hits,
            codebook_fallback_words=fallback_words,
        )

    @property
    def correct_rate(self) -> float:
        return self.counts.correct / self.trials

    @property
    def intrusion_rate(self) -> float:
        return self.counts.intrusion_declared / self.trials

    def to_csv_rows(self) -> List[Mapping[str, Any]]:
        row = {
            key: value
            for key, value in self.to_json().items()
            if key not in ("counts", "unattacked", "attacked")
        }
        for prefix in ("unattacked", "attacked"):
            for key, value in getattr(self, prefix).to_json().items():
                row[f"{prefix}_{key}"] = value
        return [row]
