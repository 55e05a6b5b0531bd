from dataclasses import dataclass
from typing import List, Tuple
from pydantic import model_validator
import numpy as np

from macauthpy.constants import CONFIG_STOCHASTIC_TOL, PROB_TOL
from macauthpy.errors import DimensionMismatchError, InvalidDistributionError
from macauthpy.models import JSONSerializableBaseModel, StrictConfigModel
from macauthpy.models.prob_models import Distribution, StochasticKernel


def external_column_order(x_size: int, v_size: int, silence_index: int) -> List[Tuple[int, int]]:
    """(x, v) pairs in the external matrix layout: the silence block first, then the
    remaining v indices ascending; x varies fastest."""
    v_order = [silence_index] + [v for v in range(v_size) if v != silence_index]
    return [(x, v) for v in v_order for x in range(x_size)]


@dataclass(frozen=True, eq=False)
class MacChannel:
    """DM-MAC P_{Y|X,V}; law[x, v, y] = P(y | x, v). V contains a designated silence symbol."""

    law: np.ndarray
    silence_index: int = 0

    def __post_init__(self) -> None:
        law = np.array(self.law, dtype=float)
        if law.ndim != 3:
            raise DimensionMismatchError("channel law must have shape (x, v, y)")
        if not 0 <= self.silence_index < law.shape[1]:
            raise DimensionMismatchError(
                f"silence index {self.silence_index} outside V of size {law.shape[1]}"
            )
        if np.any(law < -PROB_TOL):
            raise InvalidDistributionError("channel law has negative entries")
        law = np.clip(law, 0.0, None)
        sums = law.sum(axis=2)
        if np.any(np.abs(sums - 1.0) > PROB_TOL):
            x, v = np.argwhere(np.abs(sums - 1.0) > PROB_TOL)[0]
            raise InvalidDistributionError(
                f"channel column (x={x}, v={v}) sums to {float(sums[x, v])!r}"
            )
        law.setflags(write=False)
        object.__setattr__(self, "law", law)

    @property
    def x_size(self) -> int:
        return int(self.law.shape[0])

    @property
    def v_size(self) -> int:
        return int(self.law.shape[1])

    @property
    def y_size(self) -> int:
        return int(self.law.shape[2])

    @property
    def active_symbols(self) -> List[int]:
        return [v for v in range(self.v_size) if v != self.silence_index]

    def column_order(self) -> List[Tuple[int, int]]:
        return external_column_order(self.x_size, self.v_size, self.silence_index)

    def to_external_matrix(self) -> np.ndarray:
        """Y x (X.V) matrix, columns in the external layout."""
        return np.stack([self.law[x, v] for x, v in self.column_order()], axis=1)

    @classmethod
    def from_external_matrix(
        cls, matrix, x_size: int, v_size: int, silence_index: int = 0
    ) -> "MacChannel":
        matrix = np.array(matrix, dtype=float)
        if matrix.shape[1] != x_size * v_size:
            raise DimensionMismatchError(
                f"expected {x_size * v_size} columns, got {matrix.shape[1]}"
            )
        law = np.zeros((x_size, v_size, matrix.shape[0]))
        for col, (x, v) in enumerate(external_column_order(x_size, v_size, silence_index)):
            law[x, v] = matrix[:, col]
        return cls(law=law, silence_index=silence_index)


@dataclass(frozen=True, eq=False)
class EncoderSpec:
    """Alice's auxiliary-variable encoder (P_U, P_{X|U})."""

    pu: Distribution
    px_given_u: StochasticKernel

    def __post_init__(self) -> None:
        if self.pu.alphabet_size != self.px_given_u.input_size:
            raise DimensionMismatchError(
                f"P_U has {self.pu.alphabet_size} symbols but P_X|U has "
                f"{self.px_given_u.input_size} inputs"
            )

    @property
    def u_size(self) -> int:
        return self.pu.alphabet_size

    @property
    def x_size(self) -> int:
        return self.px_given_u.output_size

    def check_against(self, ch: MacChannel) -> None:
        if self.x_size != ch.x_size:
            raise DimensionMismatchError(
                f"encoder emits {self.x_size} input symbols, channel takes {ch.x_size}"
            )

    @classmethod
    def without_auxiliary(cls, px: Distribution) -> "EncoderSpec":
        """U = X: the deterministic-encoder scheme."""
        return cls(pu=px, px_given_u=StochasticKernel.identity(px.alphabet_size))


def _check_columns(matrix: np.ndarray, key: str, labels: List[str]) -> None:
    if np.any(matrix < 0):
        row, col = np.argwhere(matrix < 0)[0]
        raise ValueError(f"{key}: negative entry at row {row}, column {col} ({labels[col]})")
    sums = matrix.sum(axis=0)
    for col, total in enumerate(sums):
        if abs(total - 1.0) > CONFIG_STOCHASTIC_TOL:
            raise ValueError(
                f"{key}: column {col} ({labels[col]}) sums to {float(total)!r}, not 1"
            )


class ChannelSpecModel(StrictConfigModel):
    """Channel block of a config: `law` is Y rows x (X.V) columns in the external layout."""

    x_size: int
    v_size: int
    y_size: int
    silence_index: int = 0
    law: List[List[float]]

    @model_validator(mode="after")
    def _validate_law(self) -> "ChannelSpecModel":
        if min(self.x_size, self.v_size, self.y_size) < 1:
            raise ValueError("alphabet sizes must be positive")
        if not 0 <= self.silence_index < self.v_size:
            raise ValueError(
                f"silence_index {self.silence_index} out of range for v_size {self.v_size}"
            )
        if len(self.law) != self.y_size:
            raise ValueError(f"law: expected {self.y_size} rows, got {len(self.law)}")
        width = self.x_size * self.v_size
        for row, values in enumerate(self.law):
            if len(values) != width:
                raise ValueError(f"law: row {row} has {len(values)} columns, expected {width}")
        labels = [
            f"x={x}, v={v}"
            for x, v in external_column_order(self.x_size, self.v_size, self.silence_index)
        ]
        _check_columns(np.array(self.law, dtype=float), "law", labels)
        return self

    def to_channel(self) -> MacChannel:
        matrix = np.array(self.law, dtype=float)
        matrix = matrix / matrix.sum(axis=0, keepdims=True)
        return MacChannel.from_external_matrix(
            matrix, self.x_size, self.v_size, self.silence_index
        )

    @classmethod
    def from_channel(cls, ch: MacChannel) -> "ChannelSpecModel":
        return cls(
            x_size=ch.x_size,
            v_size=ch.v_size,
            y_size=ch.y_size,
            silence_index=ch.silence_index,
            law=ch.to_external_matrix().tolist(),
        )


class EncoderSpecModel(StrictConfigModel):
    """Encoder block: `px_given_u` is X rows x U columns (columns are conditionals)."""

    u_size: int
    pu: List[float]
    px_given_u: List[List[float]]

    @model_validator(mode="after")
    def _validate_encoder(self) -> "EncoderSpecModel":
        if self.u_size < 1:
            raise ValueError("u_size must be positive")
        if len(self.pu) != self.u_size:
            raise ValueError(f"pu: expected {self.u_size} entries, got {len(self.pu)}")
        pu = np.array(self.pu, dtype=float)
        if np.any(pu < 0) or abs(pu.sum() - 1.0) > CONFIG_STOCHASTIC_TOL:
            raise ValueError(f"pu: not a distribution (sum {float(pu.sum())!r})")
        for row, values in enumerate(self.px_given_u):
            if len(values) != self.u_size:
                raise ValueError(
                    f"px_given_u: row {row} has {len(values)} columns, expected {self.u_size}"
                )
        if len(self.px_given_u) == 0:
            raise ValueError("px_given_u: no rows")
        _check_columns(
            np.array(self.px_given_u, dtype=float),
            "px_given_u",
            [f"u={u}" for u in range(self.u_size)],
        )
        return self

    def to_encoder(self) -> EncoderSpec:
        columns = np.array(self.px_given_u, dtype=float)
        columns = columns / columns.sum(axis=0, keepdims=True)
        return EncoderSpec(
            pu=Distribution.normalized(self.pu),
            px_given_u=StochasticKernel.from_columns(columns),
        )

    @classmethod
    def from_encoder(cls, enc: EncoderSpec) -> "EncoderSpecModel":
        return cls(
            u_size=enc.u_size,
            pu=enc.pu.mass.tolist(),
            px_given_u=enc.px_given_u.to_columns().tolist(),
        )


class EncoderSummary(JSONSerializableBaseModel):
    """Encoder as it appears inside reports (no strict key checking)."""

    u_size: int
    pu: List[float]
    px_given_u: List[List[float]]

    @classmethod
    def from_encoder(cls, enc: EncoderSpec) -> "EncoderSummary":
        return cls(
            u_size=enc.u_size,
            pu=enc.pu.mass.tolist(),
            px_given_u=enc.px_given_u.to_columns().tolist(),
        )

    def to_encoder(self) -> EncoderSpec:
        return EncoderSpecModel(**self.to_json()).to_encoder()
