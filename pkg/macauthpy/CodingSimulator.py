from macauthpy.models import AttackKind, TargetPolicy
from macauthpy.models.channel_models import EncoderSpec, MacChannel
from macauthpy.models.prob_models import StochasticKernel, TypicalityParams
from macauthpy.models.sim_models import (
    AttackStrategy,
    AttackTransmission,
    Codebook,
    Outcome,
    TrialConfig,
    TrialReport,
    TrialTally,
    message_count,
)
from macauthpy.channel import effective_channel, sample_conditional, sample_output
from macauthpy.infotheory import is_typical, nearest_type
from macauthpy.errors import (
    CodebookGenerationError,
    DimensionMismatchError,
    InvalidAttackError,
    SymbolOutOfRangeError,
)
from macauthpy.constants import (
    CODEBOOK_MAX_ATTEMPTS,
    DECODE_CHUNK,
    MAX_CODEWORDS,
    PROB_TOL,
)
import macauthpy.util as util

from typing import Optional
import logging
import numpy as np

logger = logging.getLogger(__name__)


def _type_distances(words: np.ndarray, pu: np.ndarray) -> np.ndarray:
    """L1 distance between each row's empirical type and pu."""
    counts = np.stack([(words == u).sum(axis=1) for u in range(pu.size)], axis=1)
    return np.abs(counts / words.shape[1] - pu[None, :]).sum(axis=1)


class CodingSimulator(object):
    """Random-coding authentication scheme over one channel and encoder: codebook
    generation, stochastic encoding, Eve's transmission, typicality decoding."""

    def __init__(
        self,
        channel: MacChannel,
        encoder: EncoderSpec,
        max_codewords: int = MAX_CODEWORDS,
    ) -> None:
        encoder.check_against(channel)
        self.__channel = channel
        self.__encoder = encoder
        self.__max_codewords = max_codewords
        self.__reference = effective_channel(channel, encoder)

    @property
    def channel(self) -> MacChannel:
        return self.__channel

    @property
    def encoder(self) -> EncoderSpec:
        return self.__encoder

    @property
    def reference_kernel(self) -> StochasticKernel:
        """P(y|u) at silence: Bob's decoding reference."""
        return self.__reference

    def generate_codebook(
        self,
        n: int,
        rate: float,
        tp: Optional[TypicalityParams] = None,
        seed: int = 0,
    ) -> Codebook:
        num_messages = message_count(n, rate)
        if num_messages < 2:
            raise ValueError(f"n = {n}, rate = {rate} gives fewer than 2 messages")
        if num_messages > self.__max_codewords:
            raise ValueError(
                f"{num_messages} codewords requested, limit is {self.__max_codewords}"
            )
        tp = tp or TypicalityParams.default(n)
        pu = self.__encoder.pu
        rng = util.derive_rng(seed)

        words = np.zeros((num_messages, n), dtype=np.int64)
        pending = np.arange(num_messages)
        for _ in range(CODEBOOK_MAX_ATTEMPTS):
            if pending.size == 0:
                break
            draws = rng.choice(pu.alphabet_size, size=(pending.size, n), p=pu.mass)
            accepted = _type_distances(draws, pu.mass) <= tp.delta + PROB_TOL
            words[pending[accepted]] = draws[accepted]
            pending = pending[~accepted]

        if pending.size > 0:
            base = nearest_type(pu, n).reconstruct()
            if not is_typical(base, pu, tp):
                raise CodebookGenerationError(
                    f"no {tp.delta:.3g}-typical sequence of length {n} exists for P_U"
                )
            logger.warning(
                "%d codeword(s) fell back to the nearest type after %d attempts",
                pending.size,
                CODEBOOK_MAX_ATTEMPTS,
            )
            for m in pending:
                words[m] = rng.permutation(base)

        logger.debug("codebook: %d words of length %d", num_messages, n)
        return Codebook(words=words, tp=tp, seed=seed, fallback_words=int(pending.size))

    def encode(self, cb: Codebook, m: int, rng: util.SeedLike) -> np.ndarray:
        """x_i ~ P(.|u_i(m)) independently."""
        if not 0 <= m < cb.num_messages:
            raise SymbolOutOfRangeError(f"message {m} not in [0, {cb.num_messages})")
        return sample_conditional(
            self.__encoder.px_given_u.matrix, cb.word(m), util.make_rng(rng)
        )

    def _pick_target(
        self, strategy: AttackStrategy, m: int, num_messages: int, rng: np.random.Generator
    ) -> int:
        if strategy.target_policy == TargetPolicy.FIXED:
            strategy.check_target(m, num_messages)
            return int(strategy.fixed_target)
        draw = int(rng.integers(num_messages - 1))
        return draw + (draw >= m)

    def _kernel_rows(self, strategy: AttackStrategy, own_size: int) -> np.ndarray:
        kernel = strategy.kernel_array()
        if kernel is None:
            raise InvalidAttackError(f"{strategy.name} attack has no kernel")
        expected = (own_size, own_size, self.__channel.v_size)
        if kernel.shape != expected:
            raise InvalidAttackError(f"attack kernel has shape {kernel.shape}, expected {expected}")
        return kernel.reshape(own_size * own_size, self.__channel.v_size)

    def run_attack(
        self,
        strategy: AttackStrategy,
        cb: Codebook,
        m: int,
        x_seq: Optional[np.ndarray],
        rng: util.SeedLike,
    ) -> AttackTransmission:
        """Eve's v^n for one transmission of message m."""
        rng = util.make_rng(rng)
        silence = self.__channel.silence_index
        n = cb.n
        target: Optional[int] = None
        kind = AttackKind(strategy.kind)

        if kind == AttackKind.SILENT:
            return AttackTransmission(np.full(n, silence, dtype=np.int64), silence)

        if kind == AttackKind.IID_SYMBOL:
            dist = strategy.iid_distribution()
            if dist.alphabet_size != self.__channel.v_size:
                raise InvalidAttackError(
                    f"iid_dist covers {dist.alphabet_size} symbols, V has {self.__channel.v_size}"
                )
            v_seq = rng.choice(dist.alphabet_size, size=n, p=dist.mass)
        elif kind == AttackKind.CODEWORD_AWARE:
            u_size = self.__encoder.u_size
            rows = self._kernel_rows(strategy, u_size)
            target = self._pick_target(strategy, m, cb.num_messages, rng)
            v_seq = sample_conditional(rows, cb.word(target) * u_size + cb.word(m), rng)
        else:
            if x_seq is None:
                raise InvalidAttackError("input-aware attacks need Alice's x^n")
            x_seq = np.asarray(x_seq, dtype=np.int64)
            if x_seq.size != n:
                raise DimensionMismatchError(f"x^n has length {x_seq.size}, expected {n}")
            x_size = self.__channel.x_size
            rows = self._kernel_rows(strategy, x_size)
            target = self._pick_target(strategy, m, cb.num_messages, rng)
            # Eve re-runs the encoder on her target with her own coins
            x_target = self.encode(cb, target, rng)
            v_seq = sample_conditional(rows, x_target * x_size + x_seq, rng)

        v_seq = np.asarray(v_seq, dtype=np.int64)
        if strategy.activity < 1.0:
            v_seq = np.where(rng.random(n) < strategy.activity, v_seq, silence)
        return AttackTransmission(v_seq, silence, target)

    def decode(
        self, cb: Codebook, y_seq: np.ndarray, tp: Optional[TypicalityParams] = None
    ) -> Optional[int]:
        """The unique message whose codeword is conditionally typical with y^n, or None
        (intrusion) when zero or several codewords match."""
        tp = tp or cb.tp
        y = np.asarray(y_seq, dtype=np.int64)
        if y.ndim != 1 or y.size != cb.n:
            raise DimensionMismatchError(f"y^n must have length {cb.n}")
        y_size = self.__channel.y_size
        if y.min() < 0 or y.max() >= y_size:
            raise SymbolOutOfRangeError(f"y symbols must lie in [0, {y_size})")

        u_size = self.__encoder.u_size
        cells = u_size * y_size
        kernel = self.__reference.matrix
        match: Optional[int] = None
        for start in range(0, cb.num_messages, DECODE_CHUNK):
            chunk = cb.words[start : start + DECODE_CHUNK]
            flat = chunk * y_size + y[None, :] + np.arange(chunk.shape[0])[:, None] * cells
            joint = np.bincount(flat.ravel(), minlength=chunk.shape[0] * cells)
            joint = joint.reshape(chunk.shape[0], u_size, y_size) / cb.n
            u_marginal = joint.sum(axis=2, keepdims=True)
            gaps = np.abs(joint - u_marginal * kernel[None, :, :]).sum(axis=(1, 2))
            hits = np.flatnonzero(gaps <= tp.delta + PROB_TOL)
            if hits.size > 1 or (hits.size == 1 and match is not None):
                return None
            if hits.size == 1:
                match = start + int(hits[0])
        return match

    def run_trials(self, cfg: TrialConfig) -> TrialReport:
        """Monte Carlo estimate of the no-attack and under-attack error rates. Trial t
        draws from the stream derived from (cfg.seed, t)."""
        cb = self.generate_codebook(cfg.n, cfg.rate, cfg.tp, cfg.seed)
        attack = cfg.attack
        fixed_target = (
            attack.fixed_target if attack.target_policy == TargetPolicy.FIXED else None
        )
        if fixed_target is not None and fixed_target >= cb.num_messages:
            raise InvalidAttackError(
                f"fixed target {fixed_target} outside the {cb.num_messages}-message codebook"
            )

        tally = TrialTally()
        for trial in range(cfg.trials):
            rng = util.derive_rng(cfg.seed, trial)
            if fixed_target is None or attack.is_silent:
                m = int(rng.integers(cb.num_messages))
            else:
                # the fixed target is never sent
                m = int(rng.integers(cb.num_messages - 1))
                m += m >= fixed_target
            x_seq = self.encode(cb, m, rng)
            transmission = self.run_attack(attack, cb, m, x_seq, rng)
            y_seq = sample_output(self.__channel, x_seq, transmission.v_seq, rng)
            decoded = self.decode(cb, y_seq, cfg.tp)
            if decoded is None:
                outcome = Outcome.INTRUSION
            elif decoded == m:
                outcome = Outcome.CORRECT
            else:
                outcome = Outcome.WRONG_MESSAGE
            tally.record(
                transmission.attacked,
                outcome,
                target_hit=transmission.target is not None and decoded == transmission.target,
            )

        report = TrialReport.from_tally(tally, cfg, cb.fallback_words)
        logger.info(
            "n=%d rate=%.4f attack=%s: eps1=%s eps2=%s",
            cfg.n,
            cfg.rate,
            attack.name,
            report.eps1_hat,
            report.eps2_hat,
        )
        return report


def run_trials(cfg: TrialConfig) -> TrialReport:
    return CodingSimulator(cfg.channel, cfg.encoder, cfg.max_codewords).run_trials(cfg)
