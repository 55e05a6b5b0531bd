"""The binary worked example: a two-input channel where Eve's symbols 0/1 either flip
Alice's bit or force the erasure-like output Y=2.

Fixture builders plus the reproduction suite run by `macauth reproduce-paper-example`.
"""
from macauthpy.models import AttackKind, CouplingMode, TargetPolicy
from macauthpy.models.channel_models import EncoderSpec, MacChannel
from macauthpy.models.config_models import FixtureCheck, SuiteReport
from macauthpy.models.prob_models import (
    Distribution,
    JointDistribution,
    StochasticKernel,
    TypicalityParams,
)
from macauthpy.models.sim_models import AttackStrategy, TrialConfig, TrialReport
from macauthpy.channel import attack_matrix_channel, clean_channel
from macauthpy.infotheory import (
    conditional_mutual_information,
    entropy,
    entropy_bits,
    mutual_information,
)
from macauthpy.MacAnalyzer import MacAnalyzer
from macauthpy.constants import DEFAULT_SUITE_SEED, DEFAULT_SUITE_TRIALS
from macauthpy.CodingSimulator import run_trials
import macauthpy.util as util

from typing import Callable, List, Optional, Sequence
import logging
import numpy as np

logger = logging.getLogger(__name__)

# Y rows x (x, v) columns: (0,s) (1,s) (0,0) (1,0) (0,1) (1,1), s = silence
EXAMPLE_LAW = [
    [0.9, 0.1, 0.1, 0.0, 0.0, 0.9],
    [0.1, 0.9, 0.9, 0.0, 0.0, 0.1],
    [0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
]
CLEAN_COLUMNS = [[0.9, 0.1, 0.0], [0.1, 0.9, 0.0]]
BASE_CROSSOVER = 0.1

RELIABILITY_RATE = 0.05
RELIABILITY_BLOCK_LENGTHS = (40, 80, 160)
ATTACK_DEMO_N = 40
ATTACK_DEMO_RATE = 0.2
DETECTION_N = 100
DETECTION_RATE = 0.05


def example_channel() -> MacChannel:
    return MacChannel.from_external_matrix(EXAMPLE_LAW, x_size=2, v_size=3, silence_index=0)


def no_aux_encoder(px: Sequence[float] = (0.5, 0.5)) -> EncoderSpec:
    return EncoderSpec.without_auxiliary(Distribution(list(px)))


def aux_encoder(p: float) -> EncoderSpec:
    """Uniform binary U, X = U flipped with probability p."""
    return EncoderSpec(pu=Distribution.uniform(2), px_given_u=StochasticKernel.binary_symmetric(p))


def binary_entropy(q: float) -> float:
    return entropy_bits(np.array([q, 1.0 - q]))


def aux_rate_closed_form(p: float) -> float:
    """1 - H2(q) for the cascade crossover q = 0.1 + 0.8 p."""
    return 1.0 - binary_entropy(BASE_CROSSOVER + (1.0 - 2.0 * BASE_CROSSOVER) * p)


def example_attack_matrix(completion: Optional[Sequence[Sequence[float]]] = None) -> np.ndarray:
    """P(x, v | x_hat) in the external row order; completion[x][x_hat] = P(x | x_hat) (identity
    when omitted). Eve stays silent when x = x_hat and otherwise sends the symbol that
    turns Alice's x into a clean-channel x_hat."""
    completion = np.eye(2) if completion is None else np.array(completion, dtype=float)
    matrix = np.zeros((6, 2))
    matrix[0, 0] = completion[0, 0]  # (0, s) | 0
    matrix[5, 0] = completion[1, 0]  # (1, 1) | 0
    matrix[1, 1] = completion[1, 1]  # (1, s) | 1
    matrix[2, 1] = completion[0, 1]  # (0, 0) | 1
    return matrix


def _check(name: str, run: Callable[[], FixtureCheck]) -> FixtureCheck:
    try:
        return run()
    except Exception as ex:
        logger.exception("fixture check %s raised", name)
        return FixtureCheck(name=name, passed=False, details={"error": str(ex)})


class WorkedExampleSuite(object):
    def __init__(self, trials: int = DEFAULT_SUITE_TRIALS, seed: int = DEFAULT_SUITE_SEED) -> None:
        self.__trials = trials
        self.__seed = seed
        self.__channel = example_channel()
        self.__analyzer = MacAnalyzer(self.__channel)

    @property
    def channel(self) -> MacChannel:
        return self.__channel

    def _trial_config(
        self, encoder: EncoderSpec, n: int, rate: float, attack: Optional[AttackStrategy] = None
    ) -> TrialConfig:
        return TrialConfig(
            n=n,
            rate=rate,
            trials=self.__trials,
            seed=self.__seed,
            tp=TypicalityParams.default(n),
            encoder=encoder,
            channel=self.__channel,
            attack=attack or AttackStrategy(),
        )

    def check_matrix_identity(self) -> FixtureCheck:
        clean = clean_channel(self.__channel).matrix
        completions = {
            "identity": None,
            "uniform": [[0.5, 0.5], [0.5, 0.5]],
            "skewed": [[0.7, 0.4], [0.3, 0.6]],
        }
        deviations = {
            name: float(np.abs(attack_matrix_channel(self.__channel, example_attack_matrix(c)).matrix - clean).max())
            for name, c in completions.items()
        }
        passed = np.allclose(clean, CLEAN_COLUMNS, atol=1e-12) and max(deviations.values()) <= 1e-12
        return FixtureCheck(name="matrix_identity", passed=bool(passed), details=deviations)

    def check_no_aux_simulatability(self) -> FixtureCheck:
        details = {}
        passed = True
        for px in ((0.5, 0.5), (0.3, 0.7), (0.9, 0.1)):
            enc = no_aux_encoder(px)
            for mode in CouplingMode:
                report = self.__analyzer.simulatability_lp(enc, mode)
                details[f"{px}/{mode.value}"] = report.residual
                passed = passed and report.feasible
        return FixtureCheck(name="no_aux_simulatability", passed=passed, details=details)

    def check_no_aux_attack_synthesis(self) -> FixtureCheck:
        enc = no_aux_encoder()
        report = self.__analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
        kernel = self.__analyzer.synthesize_attack(enc, report).input_array()
        # [x_hat][x] -> v index: silence when equal, else the flipping symbol
        expected = np.zeros((2, 2, 3))
        expected[0, 0, 0] = expected[1, 1, 0] = 1.0
        expected[0, 1, 2] = 1.0
        expected[1, 0, 1] = 1.0
        deviation = float(np.abs(kernel - expected).max())
        return FixtureCheck(
            name="no_aux_attack_synthesis",
            passed=deviation <= 1e-6,
            details={"max_deviation": deviation},
        )

    def check_aux_admissibility(self) -> FixtureCheck:
        details = {}
        passed = True
        for p in (0.05, 0.1, 0.2, 0.4):
            enc = aux_encoder(p)
            report = self.__analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
            active = self.__analyzer.max_active_mass(enc)
            details[str(p)] = {"residual": report.residual, "max_active_mass": active}
            passed = passed and not report.feasible and report.residual >= 0.005 and active <= 1e-6
        return FixtureCheck(name="aux_admissibility", passed=passed, details=details)

    def check_rate_closed_form(self) -> FixtureCheck:
        crossovers = (0.2, 0.1, 0.05)
        rates = [self.__analyzer.rate(aux_encoder(p)) for p in crossovers]
        errors = [abs(rate - aux_rate_closed_form(p)) for rate, p in zip(rates, crossovers)]
        limit = 1.0 - binary_entropy(BASE_CROSSOVER)
        passed = (
            max(errors) <= 1e-6
            and all(a < b for a, b in zip(rates, rates[1:]))
            and rates[-1] < limit
            and abs(rates[1] - 0.3199) <= 1e-4
        )
        return FixtureCheck(
            name="rate_closed_form",
            passed=passed,
            details={"rates": dict(zip(map(str, crossovers), rates)), "limit": limit},
        )

    def check_reliability_trend(self) -> FixtureCheck:
        enc = aux_encoder(BASE_CROSSOVER)
        eps1 = [
            run_trials(self._trial_config(enc, n, RELIABILITY_RATE)).eps1_hat
            for n in RELIABILITY_BLOCK_LENGTHS
        ]
        passed = all(a > b for a, b in zip(eps1, eps1[1:])) and eps1[-1] <= 0.15
        return FixtureCheck(
            name="reliability_trend",
            passed=passed,
            details={"rate": RELIABILITY_RATE, "eps1": dict(zip(map(str, RELIABILITY_BLOCK_LENGTHS), eps1))},
        )

    def attack_demonstration(self) -> List[TrialReport]:
        """(silent run, flip-to-target attack run) on the no-aux scheme."""
        enc = no_aux_encoder()
        report = self.__analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
        kernel = self.__analyzer.synthesize_attack(enc, report)
        attack = AttackStrategy(
            kind=AttackKind.INPUT_AWARE,
            label="flip_to_target",
            kernel=kernel.input_kernel,
            target_policy=TargetPolicy.UNIFORM,
        )
        silent = run_trials(self._trial_config(enc, ATTACK_DEMO_N, ATTACK_DEMO_RATE))
        attacked = run_trials(self._trial_config(enc, ATTACK_DEMO_N, ATTACK_DEMO_RATE, attack))
        return [silent, attacked]

    def check_attack_demonstration(self) -> FixtureCheck:
        silent, attacked = self.attack_demonstration()
        correct = silent.unattacked.correct / silent.unattacked.total
        intrusion = silent.unattacked.intrusion_declared / silent.unattacked.total
        attacked_intrusion = attacked.attacked.intrusion_declared / attacked.attacked.total
        success = attacked.eve_success_rate
        passed = abs(success - correct) <= 0.05 and abs(attacked_intrusion - intrusion) <= 0.05
        return FixtureCheck(
            name="attack_demonstration",
            passed=passed,
            details={
                "eve_success_rate": success,
                "no_attack_correct_rate": correct,
                "attacked_intrusion_rate": attacked_intrusion,
                "no_attack_intrusion_rate": intrusion,
            },
        )

    def check_detection(self) -> FixtureCheck:
        attack = AttackStrategy(kind=AttackKind.IID_SYMBOL, label="iid_active", iid_dist=[0.0, 0.5, 0.5])
        report = run_trials(
            self._trial_config(aux_encoder(BASE_CROSSOVER), DETECTION_N, DETECTION_RATE, attack)
        )
        passed = report.eps2_hat is not None and report.eps2_hat <= 0.01
        return FixtureCheck(
            name="detection", passed=passed, details={"eps2_hat": report.eps2_hat}
        )

    def check_information_measures(self) -> FixtureCheck:
        h = entropy(Distribution([0.9, 0.1]))
        bsc = mutual_information(
            StochasticKernel.binary_symmetric(0.1).joint_with(Distribution.uniform(2))
        )
        aux = self.__analyzer.rate(aux_encoder(BASE_CROSSOVER))
        rng = util.make_rng(self.__seed)
        joint = JointDistribution(rng.dirichlet(np.ones(12)).reshape(2, 3, 2))
        chain = mutual_information(joint.merge_axes([1, 2])) - (
            mutual_information(joint.marginal([0, 2])) + conditional_mutual_information(joint)
        )
        passed = (
            abs(h - 0.46900) <= 1e-4
            and abs(bsc - 0.53100) <= 1e-4
            and abs(aux - 0.3199) <= 1e-4
            and abs(chain) <= 1e-10
            and conditional_mutual_information(joint) >= 0.0
        )
        return FixtureCheck(
            name="information_measures",
            passed=passed,
            details={"binary_entropy_0.1": h, "bsc_0.1": bsc, "aux_rate_0.1": aux, "chain_rule_gap": chain},
        )

    def run(self) -> SuiteReport:
        checks = [
            ("matrix_identity", self.check_matrix_identity),
            ("no_aux_simulatability", self.check_no_aux_simulatability),
            ("no_aux_attack_synthesis", self.check_no_aux_attack_synthesis),
            ("aux_admissibility", self.check_aux_admissibility),
            ("rate_closed_form", self.check_rate_closed_form),
            ("reliability_trend", self.check_reliability_trend),
            ("attack_demonstration", self.check_attack_demonstration),
            ("detection", self.check_detection),
            ("information_measures", self.check_information_measures),
        ]
        results = []
        for name, run in checks:
            result = _check(name, run)
            logger.info("fixture %s: %s", name, "pass" if result.passed else "FAIL")
            results.append(result)
        return SuiteReport(trials=self.__trials, seed=self.__seed, checks=results)
