from macauthpy.models import AttackKind, Command, CouplingMode, ErrorMessage, ReportFormat
from macauthpy.models.analysis_models import (
    AttackKernel,
    FeasibilityReport,
    MembershipVerdict,
    RateBoundResult,
)
from macauthpy.models.channel_models import EncoderSpec
from macauthpy.models.config_models import (
    ExperimentConfig,
    OutputRecord,
    ReproduceBlock,
    SuiteReport,
)
from macauthpy.models.prob_models import TypicalityParams
from macauthpy.models.report_store import IReportStore, LocalReportStore
from macauthpy.models.sim_models import AttackStrategy, TrialConfig, TrialReport
from macauthpy.MacAnalyzer import MacAnalyzer
from macauthpy.CodingSimulator import CodingSimulator
from macauthpy.worked_example import WorkedExampleSuite
from macauthpy.errors import ConfigError, InvalidAttackError, MacAuthError, StageError
import macauthpy.util as util
import macauthpy

from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union
from pydantic import ValidationError
import json
import logging
import time

logger = logging.getLogger(__name__)

BUNDLED_CONFIG = Path(Path(__file__).parent, "data", "worked_example.json")

Results = Tuple[Dict[str, Any], Optional[bool]]


def _describe_location(loc: Tuple[Union[str, int], ...]) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def parse_config(text: str) -> ExperimentConfig:
    """Validated config, or ConfigError whose `errors` name each offending key."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as ex:
        raise ConfigError(
            "config is not valid JSON", [f"line {ex.lineno}, column {ex.colno}: {ex.msg}"]
        )
    if not isinstance(payload, dict):
        raise ConfigError("config must be a JSON object", ["<root>"])
    try:
        return ExperimentConfig(**payload)
    except ValidationError as ex:
        errors = [f"{_describe_location(err['loc'])}: {err['msg']}" for err in ex.errors()]
        raise ConfigError("invalid experiment config", errors)


def serialize_config(cfg: ExperimentConfig) -> str:
    return util.canonical_json(cfg.to_json(), indent=2)


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    with open(path or BUNDLED_CONFIG, "r") as config_file:
        return parse_config(config_file.read())


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical config JSON; floats use shortest round-trip repr."""
    return util.stable_hash(cfg.to_json())


def with_suite_trials(cfg: ExperimentConfig, trials: int) -> ExperimentConfig:
    """Copy of cfg whose reproduce block runs `trials` Monte Carlo trials per cell."""
    try:
        block = ReproduceBlock(trials=trials, seed=cfg.reproduce.seed)
    except ValidationError as ex:
        errors = [f"reproduce.{_describe_location(err['loc'])}: {err['msg']}" for err in ex.errors()]
        raise ConfigError("invalid suite trial count", errors)
    return cfg.model_copy(update={"reproduce": block})


class ExperimentRunner(object):
    """Dispatches one command against one config and wraps the outcome in an
    OutputRecord. Stage failures land in record.error instead of propagating; results
    finished before the failure are kept."""

    def __init__(self, cfg: ExperimentConfig) -> None:
        self.__cfg = cfg
        self.__channel = cfg.channel.to_channel()
        self.__analyzer = MacAnalyzer(self.__channel)
        self.__partial: Optional[Dict[str, Any]] = None

    @property
    def config(self) -> ExperimentConfig:
        return self.__cfg

    def _encoder(self, command: Command) -> EncoderSpec:
        if self.__cfg.encoder is None:
            raise ConfigError(f"{command.value} needs an encoder block", ["encoder"])
        return self.__cfg.encoder.to_encoder()

    def _witness_report(self, enc: EncoderSpec) -> FeasibilityReport:
        """Product-coupling witness when one exists, general-mode otherwise."""
        for mode in (CouplingMode.PRODUCT_COUPLING, CouplingMode.GENERAL):
            report = self.__analyzer.simulatability_lp(enc, mode)
            if report.feasible:
                return report
        raise InvalidAttackError("no feasible coupling to synthesize an attack from")

    def resolve_attack(self, attack: AttackStrategy, enc: EncoderSpec) -> AttackStrategy:
        """Fills in a missing kernel for the aware kinds from the analyzer's witness."""
        kind = AttackKind(attack.kind)
        if attack.kernel is not None or kind not in (
            AttackKind.CODEWORD_AWARE,
            AttackKind.INPUT_AWARE,
        ):
            return attack
        kernel = self.__analyzer.synthesize_attack(enc, self._witness_report(enc))
        chosen = kernel.codeword_kernel if kind == AttackKind.CODEWORD_AWARE else kernel.input_kernel
        logger.info("synthesized %s kernel from the %s witness", kind.value, kernel.source_mode)
        return attack.model_copy(update={"kernel": chosen})

    def _analyze(self) -> Results:
        enc = self._encoder(Command.ANALYZE)
        block = self.__cfg.analyze
        report = self.__analyzer.simulatability_lp(enc, block.mode)
        verdict = self.__analyzer.membership_check(enc, block.rate)
        return {
            "feasibility": report.to_json(),
            "verdict": verdict.to_json(),
            "rate_bound": self.__analyzer.rate(enc),
            "max_active_mass": self.__analyzer.max_active_mass(enc),
        }, None

    def _rate_bound(self) -> Results:
        block = self.__cfg.rate_bound
        result = self.__analyzer.optimize_rate_bound(block.u_size_max, block.search)
        return result.to_json(), None

    def _synthesize_attack(self) -> Results:
        enc = self._encoder(Command.SYNTHESIZE_ATTACK)
        report = self._witness_report(enc)
        kernel = self.__analyzer.synthesize_attack(enc, report)
        return {"feasibility": report.to_json(), "attack": kernel.to_json()}, None

    def _simulate(self) -> Results:
        block = self.__cfg.simulate
        if block is None:
            raise ConfigError("simulate needs a simulate block", ["simulate"])
        enc = self._encoder(Command.SIMULATE)
        simulator = CodingSimulator(self.__channel, enc, block.max_codewords)
        attacks = [self.resolve_attack(attack, enc) for attack in block.attacks]
        cells: List[Mapping[str, Any]] = []
        self.__partial = {"cells": cells}
        for n in block.n:
            tp = TypicalityParams.for_block_length(n, block.delta_override)
            for rate in block.rate:
                for attack in attacks:
                    cfg = TrialConfig(
                        n=n,
                        rate=rate,
                        trials=block.trials,
                        seed=block.seed,
                        tp=tp,
                        encoder=enc,
                        channel=self.__channel,
                        attack=attack,
                        max_codewords=block.max_codewords,
                    )
                    cells.append(simulator.run_trials(cfg).to_json())
        return {"cells": cells}, None

    def _reproduce(self) -> Results:
        block = self.__cfg.reproduce
        suite = WorkedExampleSuite(trials=block.trials, seed=block.seed).run()
        return suite.to_json(), suite.passed

    def run_command(self, command: Union[Command, str]) -> OutputRecord:
        command = Command(command)
        handlers: Dict[Command, Callable[[], Results]] = {
            Command.ANALYZE: self._analyze,
            Command.RATE_BOUND: self._rate_bound,
            Command.SIMULATE: self._simulate,
            Command.SYNTHESIZE_ATTACK: self._synthesize_attack,
            Command.REPRODUCE_EXAMPLE: self._reproduce,
        }
        started_at = util.now()
        clock = time.perf_counter()
        results: Optional[Dict[str, Any]] = None
        passed: Optional[bool] = None
        error: Optional[ErrorMessage] = None
        self.__partial = None
        logger.info("running %s", command.value)
        try:
            results, passed = handlers[command]()
        except (MacAuthError, ValueError) as ex:
            stage_error = StageError(command.value, ex)
            logger.error("%s", stage_error)
            error = ErrorMessage(
                message=str(stage_error), errors=getattr(ex, "errors", [])
            )
            results = self.__partial
            if results is not None:
                logger.warning("keeping %d finished %s cells", len(results["cells"]), command.value)

        return OutputRecord(
            command=command.value,
            config_hash=config_hash(self.__cfg),
            library_version=macauthpy.__version__,
            seeds=self.__cfg.seeds_for(command),
            config=self.__cfg.to_json(),
            results=results,
            passed=passed,
            started_at=util.to_iso8601_str(started_at),
            duration_seconds=time.perf_counter() - clock,
            error=error,
        )


def run_command(cfg: ExperimentConfig, command: Union[Command, str]) -> OutputRecord:
    return ExperimentRunner(cfg).run_command(command)


def report_rows(record: OutputRecord) -> List[Mapping[str, Any]]:
    """Flat CSV rows: one per simulation cell, trace record, kernel row or fixture check."""
    results = record.results
    if results is None:
        message = record.error.message if record.error is not None else ""
        return [{"command": record.command, "error": message}]
    command = Command(record.command)
    if command == Command.SIMULATE:
        rows = [TrialReport(**cell).to_csv_rows()[0] for cell in results["cells"]]
        if record.error is not None:
            rows.append({"command": record.command, "error": record.error.message})
        return rows
    if command == Command.ANALYZE:
        row = dict(FeasibilityReport(**results["feasibility"]).to_csv_rows()[0])
        for key, value in MembershipVerdict(**results["verdict"]).to_csv_rows()[0].items():
            row[f"verdict_{key}"] = value
        row["rate_bound"] = results["rate_bound"]
        row["max_active_mass"] = results["max_active_mass"]
        return [row]
    if command == Command.RATE_BOUND:
        return RateBoundResult(**results).to_csv_rows()
    if command == Command.SYNTHESIZE_ATTACK:
        return AttackKernel(**results["attack"]).to_csv_rows()
    return SuiteReport(**results).to_csv_rows()


def write_report(
    record: OutputRecord,
    fmt: Union[ReportFormat, str] = ReportFormat.JSON,
    path: Optional[Union[str, Path]] = None,
    store: Optional[IReportStore] = None,
) -> str:
    """Writes the record and returns the output path. I/O errors propagate unchanged."""
    fmt = ReportFormat(fmt)
    if store is None:
        default_name = f"report.{fmt.value}"
        store = LocalReportStore(default_name, None if path is None else str(path))
    if fmt == ReportFormat.JSON:
        store.save_record(record)
    else:
        store.save_rows(report_rows(record))
    return store.report_output_path
