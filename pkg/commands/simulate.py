import logging
import sys
from argparse import Namespace
from typing import Any, Mapping

from commands.base import EXIT_OK, Command
from commands.thp.engine import run_sweep
from commands.thp.formatters import ResultFormatter
from commands.thp.log import sim_logger_handler
from commands.thp.parsers import ConfigParser

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)


class SimulateCommand(Command):
    """rate sweep over the configured schemes, SNR grid and feedback sizes"""
    name = 'simulate'
    help = 'monte carlo rate sweep, writes simulate.csv'

    def _invoke(self, args: Namespace, settings: Mapping[str, Any]) -> int:
        config = ConfigParser.parse(settings)
        records = run_sweep(config)
        text = ResultFormatter.format_csv(records)
        path = ResultFormatter.write(text, self.output_path(config.output, 'simulate.csv'))
        logger.info(f"wrote {len(records)} rate records to {path}")
        if getattr(args, 'print', False):
            sys.stdout.write(text)
        return EXIT_OK
