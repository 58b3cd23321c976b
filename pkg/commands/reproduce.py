from argparse import Namespace
from typing import Any, Mapping

from commands.base import EXIT_OK, Command
from commands.thp.figures import reproduce
from commands.thp.parsers import ConfigParser


class ReproduceCommand(Command):
    """CSV and plot script for one figure"""
    name = 'reproduce'
    help = 'reproduce fig2, fig3 or fig4 into the output directory'

    def _invoke(self, args: Namespace, settings: Mapping[str, Any]) -> int:
        config = ConfigParser.parse(settings)
        reproduce(args.figure, config, config.output)
        return EXIT_OK
