from macauthpy.models import CouplingMode
from macauthpy.models.analysis_models import (
    AttackKernel,
    FeasibilityReport,
    MembershipVerdict,
    RateBoundResult,
    RateSearchConfig,
    TraceRecord,
)
from macauthpy.models.channel_models import EncoderSpec, EncoderSummary, MacChannel
from macauthpy.models.prob_models import Distribution, StochasticKernel
from macauthpy.channel import clean_channel, encoder_output_law, effective_channel
from macauthpy.infotheory import channel_capacity, mutual_information_bits
from macauthpy.simplex import DenseSimplex
from macauthpy.errors import InvalidAttackError, LinearProgramError
from macauthpy.constants import (
    FEASIBILITY_TOL,
    FW_GAP_TOL,
    FW_MAX_ITERATIONS,
    FW_SMOOTHING,
    LINE_SEARCH_STEPS,
    PROB_TOL,
)
import macauthpy.util as util

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

_FW_START_VERTICES = 8
_FW_STALL_GAIN = 1e-12
_FW_STALL_ROUNDS = 200
_ASCENT_MIN_GAIN = 1e-12


@dataclass(frozen=True, eq=False)
class ConfusionResult:
    """Frank-Wolfe outcome: value is I(U';U,V) at the returned coupling, gap bounds its
    distance to the true minimum."""

    value: float
    coupling: np.ndarray
    gap: float
    iterations: int


def project_to_simplex(vec: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    ordered = np.sort(vec)[::-1]
    cumulative = np.cumsum(ordered) - 1.0
    index = np.arange(1, vec.size + 1)
    rho = int(np.flatnonzero(ordered - cumulative / index > 0)[-1])
    theta = cumulative[rho] / (rho + 1)
    projected = np.maximum(vec - theta, 0.0)
    return projected / projected.sum()


def _golden_section(phi: Callable[[float], float], steps: int) -> float:
    """argmin of a convex function on [0, 1]."""
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 0.0, 1.0
    a, b = hi - ratio * (hi - lo), lo + ratio * (hi - lo)
    fa, fb = phi(a), phi(b)
    for _ in range(steps):
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - ratio * (hi - lo)
            fa = phi(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + ratio * (hi - lo)
            fb = phi(b)
    candidates = [0.0, (lo + hi) / 2.0, 1.0]
    return min(candidates, key=phi)


def _fill_silent(joint: np.ndarray, silence_index: int) -> np.ndarray:
    """Normalizes the last axis of joint; rows without mass emit silence."""
    mass = joint.sum(axis=-1, keepdims=True)
    silent = np.zeros(joint.shape[-1])
    silent[silence_index] = 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(mass > PROB_TOL, joint / np.where(mass > 0, mass, 1.0), silent)
    return kernel


class MacAnalyzer(object):
    """Simulatability analysis of one DM-MAC: U+ membership, confusion information,
    attack synthesis and the inner-bound rate search."""

    def __init__(
        self,
        channel: MacChannel,
        feasibility_tol: float = FEASIBILITY_TOL,
        fw_max_iterations: int = FW_MAX_ITERATIONS,
        fw_gap_tol: float = FW_GAP_TOL,
    ) -> None:
        self.__channel = channel
        self.__feasibility_tol = feasibility_tol
        self.__fw_max_iterations = fw_max_iterations
        self.__fw_gap_tol = fw_gap_tol
        self.__clean = clean_channel(channel)

    @property
    def channel(self) -> MacChannel:
        return self.__channel

    @property
    def feasibility_tol(self) -> float:
        return self.__feasibility_tol

    def rate(self, enc: EncoderSpec) -> float:
        """I(Y;U|V=silence) in bits."""
        enc.check_against(self.__channel)
        joint = enc.pu.mass[:, None] * (enc.px_given_u.matrix @ self.__clean.matrix)
        return mutual_information_bits(joint)

    def _constraints(
        self, enc: EncoderSpec, mode: CouplingMode
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(hard A, hard b, channel-match A, channel-match b) over J(u',u,v) flattened as
        (u' * U + u) * V + v."""
        u_size, v_size = enc.u_size, self.__channel.v_size
        pu = enc.pu.mass
        w = encoder_output_law(self.__channel, enc)
        reference = effective_channel(self.__channel, enc).matrix

        hard_a = [np.kron(np.eye(u_size), np.ones(u_size * v_size))]
        hard_b = [pu]
        if mode == CouplingMode.PRODUCT_COUPLING:
            hard_a.append(np.kron(np.eye(u_size * u_size), np.ones(v_size)))
            hard_b.append(np.outer(pu, pu).ravel())

        # row u' * |Y| + y
        match_a = np.kron(np.eye(u_size), w.reshape(u_size * v_size, -1).T)
        match_b = (pu[:, None] * reference).ravel()
        return np.vstack(hard_a), np.concatenate(hard_b), match_a, match_b

    def _general_polytope(self, enc: EncoderSpec) -> DenseSimplex:
        hard_a, hard_b, match_a, match_b = self._constraints(enc, CouplingMode.GENERAL)
        return DenseSimplex(
            np.vstack([hard_a, match_a]),
            np.concatenate([hard_b, match_b]),
            feasibility_tol=self.__feasibility_tol,
        )

    def simulatability_lp(
        self, enc: EncoderSpec, mode: CouplingMode = CouplingMode.PRODUCT_COUPLING
    ) -> FeasibilityReport:
        """Minimum total L1 violation of the attacked-equals-clean condition over the
        mode's coupling polytope, with a witness coupling when it vanishes."""
        mode = CouplingMode(mode)
        enc.check_against(self.__channel)
        hard_a, hard_b, match_a, match_b = self._constraints(enc, mode)
        num_vars = hard_a.shape[1]
        num_slack = match_a.shape[0]

        a_eq = np.zeros((hard_a.shape[0] + num_slack, num_vars + 2 * num_slack))
        a_eq[: hard_a.shape[0], :num_vars] = hard_a
        a_eq[hard_a.shape[0] :, :num_vars] = match_a
        a_eq[hard_a.shape[0] :, num_vars : num_vars + num_slack] = np.eye(num_slack)
        a_eq[hard_a.shape[0] :, num_vars + num_slack :] = -np.eye(num_slack)
        cost = np.concatenate([np.zeros(num_vars), np.ones(2 * num_slack)])

        solution = DenseSimplex(
            a_eq, np.concatenate([hard_b, match_b]), feasibility_tol=self.__feasibility_tol
        ).solve(cost)
        if not solution.is_optimal:
            # slack makes every LP here feasible; only a broken constraint set lands here
            raise LinearProgramError(f"residual LP ended {solution.status.value}")

        residual = max(float(solution.objective), 0.0)
        feasible = residual <= self.__feasibility_tol
        witness = None
        if feasible:
            joint = np.clip(solution.x[:num_vars], 0.0, None)
            joint = joint / joint.sum()
            witness = joint.reshape(enc.u_size, enc.u_size, self.__channel.v_size).tolist()
        logger.info(
            "simulatability LP (%s): residual %.3g, feasible=%s", mode.value, residual, feasible
        )
        return FeasibilityReport(
            feasible=feasible,
            residual=residual,
            witness=witness,
            mode=mode,
            tolerance=self.__feasibility_tol,
        )

    def max_active_mass(self, enc: EncoderSpec) -> float:
        """Largest total mass any general-mode feasible coupling puts on non-silent v."""
        enc.check_against(self.__channel)
        v_size = self.__channel.v_size
        active = np.ones(v_size)
        active[self.__channel.silence_index] = 0.0
        cost = -np.tile(active, enc.u_size * enc.u_size)
        solution = self._general_polytope(enc).solve(cost)
        if not solution.is_optimal:
            raise LinearProgramError(f"active-mass LP ended {solution.status.value}")
        return max(-float(solution.objective), 0.0)

    def min_confusion_coupling(self, enc: EncoderSpec) -> ConfusionResult:
        """Frank-Wolfe minimisation of I(U';U,V) over the general-mode polytope, using the
        simplex as the linear-minimisation oracle."""
        enc.check_against(self.__channel)
        u_size, v_size = enc.u_size, self.__channel.v_size
        shape = (u_size, u_size * v_size)
        if u_size == 1:
            joint = np.zeros(shape)
            joint[0, self.__channel.silence_index] = 1.0
            return ConfusionResult(0.0, joint.reshape(1, 1, v_size), 0.0, 0)

        pu = enc.pu.mass
        pu_safe = np.where(pu > 0, pu, 1.0)[:, None]
        polytope = self._general_polytope(enc)

        def objective(flat: np.ndarray) -> float:
            return mutual_information_bits(np.clip(flat, 0.0, None).reshape(shape))

        def gradient(flat: np.ndarray) -> np.ndarray:
            joint = np.clip(flat, 0.0, None).reshape(shape)
            q = joint.sum(axis=0, keepdims=True)
            grad = np.log2((joint + FW_SMOOTHING) / (pu_safe * (q + FW_SMOOTHING)))
            grad[pu <= 0] = 0.0
            return grad.ravel()

        def oracle(cost: np.ndarray) -> np.ndarray:
            solution = polytope.solve(cost)
            if not solution.is_optimal:
                raise LinearProgramError(f"Frank-Wolfe oracle ended {solution.status.value}")
            return solution.x

        silent = np.zeros((u_size, u_size, v_size))
        silent[np.arange(u_size), np.arange(u_size), self.__channel.silence_index] = pu
        rng = util.make_rng(0)
        starts = [silent.ravel()] + [
            oracle(rng.standard_normal(silent.size)) for _ in range(_FW_START_VERTICES)
        ]
        current = np.mean(starts, axis=0)

        gap = float("inf")
        iteration = 0
        value = objective(current)
        stalled = 0
        for iteration in range(1, self.__fw_max_iterations + 1):
            grad = gradient(current)
            vertex = oracle(grad)
            direction = vertex - current
            gap = float(-grad @ direction)
            if gap <= self.__fw_gap_tol:
                break
            step = _golden_section(
                lambda gamma: objective(current + gamma * direction), LINE_SEARCH_STEPS
            )
            if step <= 0.0:
                logger.debug("Frank-Wolfe: no descent along the oracle direction, gap %.3g", gap)
                break
            current = current + step * direction
            previous, value = value, objective(current)
            stalled = stalled + 1 if previous - value < _FW_STALL_GAIN else 0
            if stalled >= _FW_STALL_ROUNDS:
                logger.debug("Frank-Wolfe: stalled at %.9f bits, gap %.3g", value, gap)
                break
        else:
            logger.warning(
                "Frank-Wolfe stopped after %d iterations with gap %.3g",
                self.__fw_max_iterations,
                gap,
            )

        value = objective(current)
        logger.debug("min confusion information %.6f bits after %d iterations", value, iteration)
        return ConfusionResult(
            value, np.clip(current, 0.0, None).reshape(u_size, u_size, v_size), max(gap, 0.0), iteration
        )

    def min_confusion_information(self, enc: EncoderSpec) -> float:
        return self.min_confusion_coupling(enc).value

    def membership_check(self, enc: EncoderSpec, rate: float = 0.0) -> MembershipVerdict:
        """U+ membership by the product-coupling LP, plus the confusion-information
        refinement when Eve has feasible couplings."""
        if rate < 0:
            raise ValueError(f"rate must be nonnegative, got {rate}")
        report = self.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
        in_u_plus = not report.feasible
        min_confusion = float("inf") if in_u_plus else self.min_confusion_information(enc)
        return MembershipVerdict(
            in_u_plus=in_u_plus,
            decision_mode=CouplingMode.PRODUCT_COUPLING,
            decision_residual=report.residual,
            rate=rate,
            min_confusion_info=min_confusion,
            rate_threshold_note=min_confusion,
            safe_at_rate=rate < min_confusion,
        )

    def synthesize_attack(self, enc: EncoderSpec, report: FeasibilityReport) -> AttackKernel:
        """Per-symbol kernels P(v|u',u) and P(v|x',x) realising the report's witness."""
        witness = report.witness_array()
        if not report.feasible or witness is None:
            raise InvalidAttackError("cannot synthesize an attack from an infeasible report")
        ch = self.__channel
        expected = (enc.u_size, enc.u_size, ch.v_size)
        if witness.shape != expected:
            raise InvalidAttackError(f"witness has shape {witness.shape}, expected {expected}")

        codeword_kernel = _fill_silent(witness, ch.silence_index)
        pxu = enc.px_given_u.matrix
        input_joint = np.einsum("pa,ub,puv->abv", pxu, pxu, witness)
        input_kernel = _fill_silent(input_joint, ch.silence_index)
        return AttackKernel(
            u_size=enc.u_size,
            x_size=ch.x_size,
            v_size=ch.v_size,
            silence_index=ch.silence_index,
            source_mode=report.mode,
            codeword_kernel=codeword_kernel.tolist(),
            input_kernel=input_kernel.tolist(),
        )

    def _decision_residual(self, enc: EncoderSpec) -> float:
        return self.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING).residual

    def _refine(
        self, enc: EncoderSpec, search: RateSearchConfig
    ) -> Tuple[EncoderSpec, float, float]:
        """Coordinate ascent on I(Y;U|silence) over the simplex blocks of (P_U, P_X|U),
        accepting only steps that stay in U+."""
        blocks: List[np.ndarray] = [enc.pu.mass.copy()] + [
            row.copy() for row in enc.px_given_u.matrix
        ]

        def build(parts: List[np.ndarray]) -> EncoderSpec:
            return EncoderSpec(
                pu=Distribution(parts[0]), px_given_u=StochasticKernel(np.vstack(parts[1:]))
            )

        best = enc
        best_rate = self.rate(enc)
        best_residual = self._decision_residual(enc)
        step = search.initial_step
        for _ in range(search.max_rounds):
            improved = False
            for index in range(len(blocks)):
                for coordinate in range(blocks[index].size):
                    for sign in (1.0, -1.0):
                        moved = blocks[index].copy()
                        moved[coordinate] += sign * step
                        moved = project_to_simplex(moved)
                        if np.allclose(moved, blocks[index], atol=PROB_TOL):
                            continue
                        trial_blocks = list(blocks)
                        trial_blocks[index] = moved
                        candidate = build(trial_blocks)
                        candidate_rate = self.rate(candidate)
                        if candidate_rate <= best_rate + _ASCENT_MIN_GAIN:
                            continue
                        residual = self._decision_residual(candidate)
                        if residual <= self.__feasibility_tol:
                            continue
                        blocks = trial_blocks
                        best, best_rate, best_residual = candidate, candidate_rate, residual
                        improved = True
            if not improved:
                step /= 2.0
                if step < search.min_step:
                    break
        return best, best_rate, best_residual

    def _run_restart(
        self, u_size: int, restart: int, search: RateSearchConfig
    ) -> Tuple[TraceRecord, Optional[EncoderSpec]]:
        rng = util.derive_rng(search.seed, u_size, restart)
        start = EncoderSpec(
            pu=Distribution.normalized(rng.dirichlet(np.ones(u_size))),
            px_given_u=StochasticKernel(rng.dirichlet(np.ones(self.__channel.x_size), size=u_size)),
        )
        residual = self._decision_residual(start)
        if residual <= self.__feasibility_tol:
            record = TraceRecord(
                restart=restart,
                u_size=u_size,
                encoder=EncoderSummary.from_encoder(start),
                rate=self.rate(start),
                in_u_plus=False,
                decision_residual=residual,
            )
            return record, None

        refined, rate, residual = self._refine(start, search)
        record = TraceRecord(
            restart=restart,
            u_size=u_size,
            encoder=EncoderSummary.from_encoder(refined),
            rate=rate,
            in_u_plus=True,
            decision_residual=residual,
        )
        return record, refined

    def optimize_rate_bound(
        self, u_size_max: int, search: Optional[RateSearchConfig] = None
    ) -> RateBoundResult:
        """Heuristic max of I(Y;U|V=silence) over encoders in U+ with |U| <= u_size_max."""
        if u_size_max < 1:
            raise ValueError(f"u_size_max must be at least 1, got {u_size_max}")
        search = search or RateSearchConfig()
        capacity, _ = channel_capacity(self.__clean)

        trace: List[TraceRecord] = []
        best: Optional[Tuple[TraceRecord, EncoderSpec]] = None
        for u_size in range(1, u_size_max + 1):
            for restart in range(search.restarts):
                record, encoder = self._run_restart(u_size, restart, search)
                trace.append(record)
                if encoder is not None and (best is None or record.rate > best[0].rate):
                    best = (record, encoder)
            logger.info("rate search: finished u_size %d", u_size)

        if best is None:
            logger.info("rate search: no candidate in U+")
            return RateBoundResult(best_rate=0.0, search_trace=trace, clean_capacity=capacity)

        record, encoder = best
        summary = EncoderSummary.from_encoder(encoder)
        best_rate = self.rate(summary.to_encoder())
        return RateBoundResult(
            best_rate=best_rate,
            best_encoder=summary,
            verdicts=self.membership_check(encoder, best_rate),
            search_trace=trace,
            clean_capacity=capacity,
        )
