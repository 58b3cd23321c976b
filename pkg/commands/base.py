import logging
import os
from abc import ABC, abstractmethod
from argparse import Namespace
from typing import Any, Dict, Mapping

from commands.thp.errors import ConfigError
from commands.thp.log import sim_logger_handler
from commands.thp.parsers import SETTING_KEYS, ConfigParser

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
logger.addHandler(sim_logger_handler)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION_FAILED = 2


class Command(ABC):
    """command line command abstract base class"""
    name: str = ''
    help: str = ''

    def run(self, args: Namespace) -> int:
        """
        resolve settings and invoke the command

        params:
            args: parsed command line arguments

        return:
            process exit code
        """
        try:
            settings = self.settings(args)
            return self._invoke(args, settings)
        except ConfigError as e:
            logger.error(f"configuration error: {str(e)}")
            return EXIT_ERROR
        except Exception as e:
            logger.error(f"failed to run {self.name}: {str(e)}")
            logger.debug("traceback", exc_info=True)
            return EXIT_ERROR

    @staticmethod
    def settings(args: Namespace) -> Dict[str, Any]:
        """config file values overridden by command line flags"""
        overrides = {key: getattr(args, key, None) for key in SETTING_KEYS}
        return ConfigParser.merge(ConfigParser.load_file(getattr(args, 'config', None)), overrides)

    @staticmethod
    def output_path(output: str, default_name: str) -> str:
        """a '.csv' output is used as given, anything else is a directory"""
        if output.endswith('.csv'):
            return output
        return os.path.join(output, default_name)

    @abstractmethod
    def _invoke(self, args: Namespace, settings: Mapping[str, Any]) -> int:
        """
        run the command

        params:
            args: parsed command line arguments
            settings: merged settings, keys from SETTING_KEYS

        return:
            process exit code
        """
        pass
