import logging
from argparse import Namespace
from typing import Any, Mapping

from commands.base import EXIT_OK, Command
from commands.thp.engine import run_scaled_feedback
from commands.thp.errors import ConfigError
from commands.thp.formatters import ResultFormatter
from commands.thp.log import sim_logger_handler
from commands.thp.parsers import ConfigParser

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)


class ScaledCommand(Command):
    """quantized TH with feedback bits scaled along the SNR grid"""
    name = 'scaled'
    help = 'scaled-feedback sweep (needs --b, optional --eps), writes scaled.csv'

    def _invoke(self, args: Namespace, settings: Mapping[str, Any]) -> int:
        config = ConfigParser.parse(settings)
        if config.scaling is None:
            raise ConfigError("failed to run scaled feedback: --b is required")
        records = run_scaled_feedback(config)
        path = ResultFormatter.write(ResultFormatter.format_csv(records),
                                     self.output_path(config.output, 'scaled.csv'))
        logger.info(f"wrote {len(records)} rate records to {path}")
        return EXIT_OK
