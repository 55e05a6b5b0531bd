"""Finite-alphabet probability value types.

All types are immutable: their arrays are copied on construction and flagged read-only.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union
import numpy as np

from macauthpy.constants import PROB_TOL
from macauthpy.errors import InvalidDistributionError, DimensionMismatchError

ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


def _frozen_mass(values: ArrayLike, what: str) -> np.ndarray:
    mass = np.array(values, dtype=float)
    if mass.size == 0:
        raise InvalidDistributionError(f"{what} has an empty alphabet")
    if not np.all(np.isfinite(mass)):
        raise InvalidDistributionError(f"{what} has non-finite entries")
    if np.any(mass < -PROB_TOL):
        raise InvalidDistributionError(
            f"{what} has negative entries (min {mass.min()!r})"
        )
    mass = np.clip(mass, 0.0, None)
    mass.setflags(write=False)
    return mass


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability mass function over {0, ..., alphabet_size - 1}."""

    mass: np.ndarray

    def __post_init__(self) -> None:
        mass = _frozen_mass(self.mass, "distribution")
        if mass.ndim != 1:
            raise InvalidDistributionError("distribution mass must be a vector")
        total = float(mass.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidDistributionError(f"distribution sums to {total!r}, not 1")
        object.__setattr__(self, "mass", mass)

    @property
    def alphabet_size(self) -> int:
        return int(self.mass.shape[0])

    def __getitem__(self, index: int) -> float:
        return float(self.mass[index])

    @classmethod
    def uniform(cls, alphabet_size: int) -> "Distribution":
        return cls(np.full(alphabet_size, 1.0 / alphabet_size))

    @classmethod
    def normalized(cls, weights: ArrayLike) -> "Distribution":
        """Rescales nonnegative weights to sum to one."""
        weights = np.clip(np.array(weights, dtype=float), 0.0, None)
        total = weights.sum()
        if total <= 0:
            raise InvalidDistributionError("weights sum to zero")
        return cls(weights / total)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint law over a product alphabet; axis i has alphabet size dims[i]."""

    mass: np.ndarray

    def __post_init__(self) -> None:
        mass = _frozen_mass(self.mass, "joint distribution")
        total = float(mass.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidDistributionError(
                f"joint distribution sums to {total!r}, not 1"
            )
        object.__setattr__(self, "mass", mass)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(int(d) for d in self.mass.shape)

    @property
    def num_axes(self) -> int:
        return self.mass.ndim

    def marginal(self, keep_axes: Sequence[int]) -> "JointDistribution":
        keep = tuple(keep_axes)
        drop = tuple(ax for ax in range(self.num_axes) if ax not in keep)
        summed = self.mass.sum(axis=drop) if drop else self.mass
        # summed keeps the remaining axes in ascending order
        order = [sorted(keep).index(ax) for ax in keep]
        return JointDistribution(np.transpose(summed, order))

    def merge_axes(self, axes: Sequence[int]) -> "JointDistribution":
        """Moves `axes` to the end and flattens them into one axis."""
        rest = [ax for ax in range(self.num_axes) if ax not in axes]
        moved = np.transpose(self.mass, rest + list(axes))
        shape = [self.mass.shape[ax] for ax in rest] + [-1]
        return JointDistribution(moved.reshape(shape))

    @classmethod
    def product(cls, *marginals: Distribution) -> "JointDistribution":
        mass = np.ones(())
        for marginal in marginals:
            mass = np.multiply.outer(mass, marginal.mass)
        return cls(mass)


@dataclass(frozen=True, eq=False)
class StochasticKernel:
    """Conditional law; matrix[i, j] = P(output j | input i).

    Rows are inputs. The external layout is the transpose: columns are inputs.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = _frozen_mass(self.matrix, "stochastic kernel")
        if matrix.ndim != 2:
            raise InvalidDistributionError("stochastic kernel must be a matrix")
        sums = matrix.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > PROB_TOL)
        if bad.size > 0:
            raise InvalidDistributionError(
                f"kernel row {int(bad[0])} sums to {float(sums[bad[0]])!r}, not 1"
            )
        object.__setattr__(self, "matrix", matrix)

    @property
    def input_size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def output_size(self) -> int:
        return int(self.matrix.shape[1])

    def to_columns(self) -> np.ndarray:
        return self.matrix.T.copy()

    @classmethod
    def from_columns(cls, columns: ArrayLike) -> "StochasticKernel":
        return cls(np.array(columns, dtype=float).T)

    @classmethod
    def identity(cls, size: int) -> "StochasticKernel":
        return cls(np.eye(size))

    @classmethod
    def binary_symmetric(cls, crossover: float) -> "StochasticKernel":
        return cls([[1.0 - crossover, crossover], [crossover, 1.0 - crossover]])

    def joint_with(self, inputs: Distribution) -> JointDistribution:
        """Joint law over (input, output) for the given input distribution."""
        if inputs.alphabet_size != self.input_size:
            raise DimensionMismatchError("input distribution size mismatch")
        return JointDistribution(inputs.mass[:, None] * self.matrix)


@dataclass(frozen=True, eq=False)
class EmpiricalType:
    """Symbol counts of a sequence (or of aligned sequences, for a joint type)."""

    counts: np.ndarray
    n: int

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=np.int64)
        if int(counts.sum()) != self.n:
            raise InvalidDistributionError("type counts do not sum to n")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / float(self.n)

    def reconstruct(self) -> np.ndarray:
        """A sequence (or aligned tuple, one row per axis) with exactly these counts."""
        flat = np.repeat(np.arange(self.counts.size), self.counts.ravel())
        if self.counts.ndim == 1:
            return flat
        return np.array(np.unravel_index(flat, self.counts.shape))


def default_delta(n: int) -> float:
    """delta(n) = n^(-1/3): delta -> 0 while sqrt(n) * delta -> infinity."""
    return float(n) ** (-1.0 / 3.0)


@dataclass(frozen=True)
class TypicalityParams:
    n: int
    delta: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"block length must be positive, got {self.n}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @classmethod
    def default(cls, n: int) -> "TypicalityParams":
        return cls(n=n, delta=default_delta(n))

    @classmethod
    def for_block_length(cls, n: int, delta: Optional[float] = None) -> "TypicalityParams":
        return cls.default(n) if delta is None else cls(n=n, delta=delta)
