import logging
import sys
from typing import Optional

# shared handler, attached by every module in the package
sim_logger_handler = logging.StreamHandler(sys.stderr)
sim_logger_handler.setFormatter(
    logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
)

# package loggers carry their own handler, keep the root handler from printing twice
logging.getLogger('commands').propagate = False


def set_verbosity(level: int, prefix: Optional[str] = 'commands') -> None:
    """
    set the level of every package logger that already exists

    params:
        level: logging level, e.g. logging.DEBUG
        prefix: logger name prefix to match
    """
    logging.getLogger(prefix).setLevel(level)
    for name, item in logging.root.manager.loggerDict.items():
        if name.startswith(prefix) and isinstance(item, logging.Logger):
            item.setLevel(level)
