"""Information measures, empirical types and strong typicality (all in bits)."""
import logging
from typing import Sequence, Tuple, Union
import numpy as np

from macauthpy.constants import PROB_TOL, BA_TOL, BA_MAX_ITERATIONS
from macauthpy.errors import (
    DimensionMismatchError,
    EmptySequenceError,
    SymbolOutOfRangeError,
)
from macauthpy.models.prob_models import (
    Distribution,
    EmpiricalType,
    JointDistribution,
    StochasticKernel,
    TypicalityParams,
)

logger = logging.getLogger(__name__)

SymbolSequence = Union[np.ndarray, Sequence[int]]
AlignedSequences = Sequence[SymbolSequence]


def entropy_bits(mass: np.ndarray) -> float:
    """-sum p log2 p over any array shape, with 0 log 0 = 0."""
    p = np.asarray(mass, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mutual_information_bits(mass: np.ndarray) -> float:
    """I(A;B) of a nonnegative 2-D array summing to one."""
    mass = np.asarray(mass, dtype=float)
    value = (
        entropy_bits(mass.sum(axis=1))
        + entropy_bits(mass.sum(axis=0))
        - entropy_bits(mass)
    )
    return max(value, 0.0)


def entropy(p: Distribution) -> float:
    return entropy_bits(p.mass)


def joint_entropy(j: JointDistribution) -> float:
    return entropy_bits(j.mass)


def conditional_entropy(j: JointDistribution, given_axes: Sequence[int]) -> float:
    """H(rest | given) = H(all) - H(given)."""
    if len(given_axes) == 0:
        return joint_entropy(j)
    return joint_entropy(j) - entropy_bits(j.marginal(given_axes).mass)


def mutual_information(j: JointDistribution) -> float:
    if j.num_axes != 2:
        raise DimensionMismatchError(f"expected 2 axes, got {j.num_axes}")
    return mutual_information_bits(j.mass)


def conditional_mutual_information(j: JointDistribution) -> float:
    """I(A;B|C) for a joint over A x B x C."""
    if j.num_axes != 3:
        raise DimensionMismatchError(f"expected 3 axes, got {j.num_axes}")
    mass = j.mass
    value = (
        entropy_bits(mass.sum(axis=1))  # H(A,C)
        + entropy_bits(mass.sum(axis=0))  # H(B,C)
        - entropy_bits(mass)
        - entropy_bits(mass.sum(axis=(0, 1)))  # H(C)
    )
    return max(value, 0.0)


def _as_symbols(seq: SymbolSequence, alphabet_size: int) -> np.ndarray:
    symbols = np.asarray(seq)
    if symbols.ndim != 1:
        raise DimensionMismatchError("symbol sequence must be one-dimensional")
    if symbols.size == 0:
        raise EmptySequenceError("empty sequences have no type")
    symbols = symbols.astype(np.int64)
    if symbols.min() < 0 or symbols.max() >= alphabet_size:
        raise SymbolOutOfRangeError(
            f"symbols must lie in [0, {alphabet_size}), got "
            f"[{int(symbols.min())}, {int(symbols.max())}]"
        )
    return symbols


def empirical_type(
    seq: Union[SymbolSequence, AlignedSequences],
    alphabet_size: Union[int, Sequence[int]],
) -> EmpiricalType:
    """Type of a sequence, or joint type of aligned sequences when alphabet_size is a
    sequence of sizes (one per aligned sequence)."""
    if np.isscalar(alphabet_size):
        symbols = _as_symbols(seq, int(alphabet_size))
        counts = np.bincount(symbols, minlength=int(alphabet_size))
        return EmpiricalType(counts=counts, n=int(symbols.size))

    sizes = tuple(int(size) for size in alphabet_size)
    if len(seq) != len(sizes):
        raise DimensionMismatchError("one alphabet size is needed per sequence")
    columns = [_as_symbols(s, size) for s, size in zip(seq, sizes)]
    n = columns[0].size
    if any(col.size != n for col in columns):
        raise DimensionMismatchError("aligned sequences differ in length")
    flat = np.ravel_multi_index(tuple(columns), sizes)
    counts = np.bincount(flat, minlength=int(np.prod(sizes))).reshape(sizes)
    return EmpiricalType(counts=counts, n=int(n))


def nearest_type(p: Distribution, n: int) -> EmpiricalType:
    """Realizable n-type closest to p (largest-remainder rounding)."""
    scaled = p.mass * n
    counts = np.floor(scaled).astype(np.int64)
    shortfall = n - int(counts.sum())
    if shortfall > 0:
        order = np.argsort(-(scaled - counts), kind="stable")
        counts[order[:shortfall]] += 1
    return EmpiricalType(counts=counts, n=n)


def is_typical(seq: SymbolSequence, p: Distribution, tp: TypicalityParams) -> bool:
    """Strong typicality: L1(type(seq), p) <= delta (closed inequality)."""
    symbols = np.asarray(seq)
    if symbols.size != tp.n:
        raise DimensionMismatchError(
            f"sequence length {symbols.size} differs from n = {tp.n}"
        )
    freq = empirical_type(symbols, p.alphabet_size).frequencies
    return float(np.abs(freq - p.mass).sum()) <= tp.delta + PROB_TOL


def conditional_typicality_gap(
    y_seq: SymbolSequence, u_seq: SymbolSequence, k: StochasticKernel
) -> float:
    """sum_{u,y} | P_{(u,y)}(u,y) - P_u(u) k(y|u) |, anchored to the empirical u-marginal."""
    joint = empirical_type((u_seq, y_seq), (k.input_size, k.output_size)).frequencies
    u_marginal = joint.sum(axis=1)
    return float(np.abs(joint - u_marginal[:, None] * k.matrix).sum())


def is_cond_typical(
    y_seq: SymbolSequence,
    u_seq: SymbolSequence,
    k: StochasticKernel,
    tp: TypicalityParams,
) -> bool:
    if len(y_seq) != tp.n or len(u_seq) != tp.n:
        raise DimensionMismatchError("sequences must both have length n")
    return conditional_typicality_gap(y_seq, u_seq, k) <= tp.delta + PROB_TOL


def channel_capacity(
    k: StochasticKernel,
    tol: float = BA_TOL,
    max_iterations: int = BA_MAX_ITERATIONS,
) -> Tuple[float, Distribution]:
    """Blahut-Arimoto. Returns (capacity in bits, capacity-achieving input law)."""
    w = k.matrix
    r = np.full(k.input_size, 1.0 / k.input_size)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.where(w > 0, np.log2(w), 0.0)
    lower = 0.0
    for iteration in range(max_iterations):
        q = r @ w
        log_q = np.where(q > 0, np.log2(np.where(q > 0, q, 1.0)), 0.0)
        # divergence D(w(.|x) || q) per input
        divergence = (w * (log_w - log_q[None, :])).sum(axis=1)
        lower = float(np.log2((r * np.exp2(divergence)).sum()))
        upper = float(divergence.max())
        if upper - lower <= tol:
            break
        r = r * np.exp2(divergence)
        r = r / r.sum()
    else:
        logger.warning("Blahut-Arimoto stopped after %d iterations", max_iterations)
    return max(lower, 0.0), Distribution.normalized(r)
