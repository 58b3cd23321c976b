import logging
import sys
from argparse import Namespace
from typing import Any, Mapping

from commands.base import EXIT_OK, EXIT_VALIDATION_FAILED, Command
from commands.thp.formatters import ResultFormatter
from commands.thp.log import sim_logger_handler
from commands.thp.parsers import DEFAULT_M, DEFAULT_OUT, DEFAULT_SEED, DEFAULT_WORKERS, MAX_WORKERS, ConfigParser
from commands.thp.validation import ValidationSettings, run_validation

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

DEFAULT_SAMPLE_SCALE = 1.0
# smallest sample scale still leaving the KS tests enough samples
MIN_SAMPLE_SCALE = 0.01


class ValidateCommand(Command):
    """statistical validation suite, exit code 2 when any check fails"""
    name = 'validate'
    help = 'run the validation suite, writes validation.csv'

    def _invoke(self, args: Namespace, settings: Mapping[str, Any]) -> int:
        scale = float(getattr(args, 'sample_scale', None) or DEFAULT_SAMPLE_SCALE)
        scale = max(MIN_SAMPLE_SCALE, min(1.0, scale))
        full = ValidationSettings()
        workers = ConfigParser.get_int(settings, 'workers', DEFAULT_WORKERS)
        validation = ValidationSettings(
            seed=ConfigParser.get_int(settings, 'seed', DEFAULT_SEED),
            M=ConfigParser.get_int(settings, 'm', DEFAULT_M),
            loopback_trials=int(full.loopback_trials * scale),
            ks_samples=int(full.ks_samples * scale),
            moment_samples=int(full.moment_samples * scale),
            rate_trials=int(full.rate_trials * scale),
            workers=max(1, min(MAX_WORKERS, workers)),
            include_scaled=bool(getattr(args, 'with_scaled', False)),
            scaled_trials=int(full.scaled_trials * scale),
        )
        checks = run_validation(validation)
        report = ResultFormatter.format_report(checks)
        sys.stdout.write(report)

        ResultFormatter.write(report, self.output_path(str(settings.get('out') or DEFAULT_OUT), 'validation.csv'))

        failed = [c.name for c in checks if not c.passed]
        if failed:
            logger.error(f"{len(failed)} validation checks failed: {failed}")
            return EXIT_VALIDATION_FAILED
        logger.info(f"all {len(checks)} validation checks passed")
        return EXIT_OK
