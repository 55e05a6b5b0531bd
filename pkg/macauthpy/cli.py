"""`macauth <command> --config <file> --out <file> --format json|csv`.

Exit status: 0 on success, 1 when a stage errors or a fixture check fails, 2 when the
config cannot be loaded.
"""
from macauthpy.models import Command, ErrorMessage, ReportFormat
from macauthpy.models.config_models import OutputRecord
from macauthpy.ExperimentRunner import (
    ExperimentRunner,
    load_config,
    with_suite_trials,
    write_report,
)
from macauthpy.errors import ConfigError
import macauthpy.util as util
import macauthpy

from typing import List, Optional
import argparse
import logging
import sys

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macauth",
        description="Keyless physical-layer authentication over a DM-MAC: analysis and simulation.",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument(
        "--config",
        type=str,
        default=None,
        help="experiment config (JSON); defaults to the bundled worked example",
    )
    parser.add_argument("--out", type=str, default=None, help="report path")
    parser.add_argument(
        "--format", choices=[f.value for f in ReportFormat], default=ReportFormat.JSON.value
    )
    parser.add_argument(
        "--trials",
        type=int,
        default=None,
        help="overrides reproduce.trials, the Monte Carlo trials per suite cell",
    )
    parser.add_argument("--log-level", type=str, default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    util.configure_logging(args.log_level)

    try:
        cfg = load_config(args.config)
        if args.trials is not None:
            cfg = with_suite_trials(cfg, args.trials)
    except (ConfigError, OSError) as ex:
        logger.error("cannot load config: %s", ex)
        record = OutputRecord(
            command=args.command,
            config_hash="",
            library_version=macauthpy.__version__,
            config={},
            started_at=util.to_iso8601_str(util.now()),
            error=ErrorMessage(message=str(ex), errors=getattr(ex, "errors", [])),
        )
        write_report(record, args.format, args.out)
        return 2

    record = ExperimentRunner(cfg).run_command(args.command)
    out_path = write_report(record, args.format, args.out)
    logger.info("report written to %s", out_path)
    return 0 if record.ok else 1


if __name__ == "__main__":
    sys.exit(main())
