"""Channel-model operations: clean / effective / attacked channels and output sampling."""
from typing import Sequence, Union
import numpy as np

from macauthpy.constants import SILENCE
from macauthpy.errors import DimensionMismatchError, SymbolOutOfRangeError
from macauthpy.models.channel_models import EncoderSpec, MacChannel
from macauthpy.models.prob_models import StochasticKernel
import macauthpy.util as util

VSymbol = Union[int, str]


def _resolve_v(ch: MacChannel, v_fixed: VSymbol) -> int:
    if v_fixed == SILENCE:
        return ch.silence_index
    if isinstance(v_fixed, str) or not 0 <= int(v_fixed) < ch.v_size:
        raise SymbolOutOfRangeError(f"v symbol {v_fixed!r} not in V of size {ch.v_size}")
    return int(v_fixed)


def _check_symbols(seq: np.ndarray, size: int, name: str) -> None:
    if seq.size and (seq.min() < 0 or seq.max() >= size):
        raise SymbolOutOfRangeError(f"{name} symbols must lie in [0, {size})")


def clean_channel(ch: MacChannel) -> StochasticKernel:
    """P_{Y|X,silence}."""
    return StochasticKernel(ch.law[:, ch.silence_index, :])


def encoder_output_law(ch: MacChannel, enc: EncoderSpec) -> np.ndarray:
    """W[u, v, y] = sum_x P(y|x,v) P(x|u)."""
    enc.check_against(ch)
    return np.einsum("ux,xvy->uvy", enc.px_given_u.matrix, ch.law)


def effective_channel(
    ch: MacChannel, enc: EncoderSpec, v_fixed: VSymbol = SILENCE
) -> StochasticKernel:
    """P(y|u) with Eve's input pinned to v_fixed."""
    v = _resolve_v(ch, v_fixed)
    return StochasticKernel(encoder_output_law(ch, enc)[:, v, :])


def _coupling_tensor(ch: MacChannel, enc: EncoderSpec, coupling: StochasticKernel) -> np.ndarray:
    if coupling.input_size != enc.u_size or coupling.output_size != enc.u_size * ch.v_size:
        raise DimensionMismatchError(
            f"coupling must map {enc.u_size} target symbols to {enc.u_size}x{ch.v_size} "
            f"(u, v) pairs, got {coupling.input_size}->{coupling.output_size}"
        )
    return coupling.matrix.reshape(enc.u_size, enc.u_size, ch.v_size)


def attacked_channel(
    ch: MacChannel, enc: EncoderSpec, coupling: StochasticKernel
) -> StochasticKernel:
    """P(y|u') under Eve's coupling P_{U,V|U'}; coupling outputs are flattened as u*|V| + v."""
    w = encoder_output_law(ch, enc)
    k = _coupling_tensor(ch, enc, coupling)
    return StochasticKernel(np.einsum("puv,uvy->py", k, w))


def silent_replay_coupling(ch: MacChannel, enc: EncoderSpec) -> StochasticKernel:
    """u = u', v = silence."""
    matrix = np.zeros((enc.u_size, enc.u_size * ch.v_size))
    for u in range(enc.u_size):
        matrix[u, u * ch.v_size + ch.silence_index] = 1.0
    return StochasticKernel(matrix)


def coupling_from_joint(ch: MacChannel, joint: np.ndarray) -> StochasticKernel:
    """Conditional P_{U,V|U'} from J(u', u, v); zero-mass u' rows fall back to silent replay."""
    joint = np.clip(np.asarray(joint, dtype=float), 0.0, None)
    u_size = joint.shape[0]
    flat = joint.reshape(u_size, -1)
    matrix = np.zeros_like(flat)
    for u_prime in range(u_size):
        total = flat[u_prime].sum()
        if total > 0:
            matrix[u_prime] = flat[u_prime] / total
        else:
            matrix[u_prime, u_prime * ch.v_size + ch.silence_index] = 1.0
    return StochasticKernel(matrix)


def joint_from_coupling(
    ch: MacChannel, enc: EncoderSpec, coupling: StochasticKernel
) -> np.ndarray:
    return enc.pu.mass[:, None, None] * _coupling_tensor(ch, enc, coupling)


def attack_matrix_channel(ch: MacChannel, attack_matrix) -> StochasticKernel:
    """Compose the law with an external-layout P_{X,V|X^} (rows = (x, v) pairs in the external
    order, columns = Eve's target symbol). Returns the kernel X^ -> Y."""
    attack_matrix = np.array(attack_matrix, dtype=float)
    external_law = ch.to_external_matrix()
    if attack_matrix.shape[0] != external_law.shape[1]:
        raise DimensionMismatchError(
            f"attack matrix needs {external_law.shape[1]} rows, got {attack_matrix.shape[0]}"
        )
    return StochasticKernel.from_columns(external_law @ attack_matrix)


def sample_conditional(
    rows: np.ndarray, given: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One draw from rows[given[i]] per position, by inverse CDF."""
    cdf = np.cumsum(rows, axis=1)
    cdf = cdf / cdf[:, -1:]
    draws = rng.random(given.size)
    picked = (cdf[given] <= draws[:, None]).sum(axis=1)
    return np.minimum(picked, rows.shape[1] - 1)


def sample_output(
    ch: MacChannel,
    x_seq: Sequence[int],
    v_seq: Sequence[int],
    rng_seed: util.SeedLike,
) -> np.ndarray:
    """y_i ~ P(.|x_i, v_i) independently; deterministic given the seed."""
    x = np.asarray(x_seq, dtype=np.int64)
    v = np.asarray(v_seq, dtype=np.int64)
    if x.shape != v.shape or x.ndim != 1:
        raise DimensionMismatchError("x and v sequences must be aligned vectors")
    _check_symbols(x, ch.x_size, "x")
    _check_symbols(v, ch.v_size, "v")
    rows = ch.law.reshape(ch.x_size * ch.v_size, ch.y_size)
    return sample_conditional(rows, x * ch.v_size + v, util.make_rng(rng_seed))
