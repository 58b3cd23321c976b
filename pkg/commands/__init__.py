"""
command line commands
one class per command, each returning a process exit code
"""

from .base import Command, EXIT_ERROR, EXIT_OK, EXIT_VALIDATION_FAILED
from .bounds import BoundsCommand
from .reproduce import ReproduceCommand
from .scaled import ScaledCommand
from .simulate import SimulateCommand
from .validate import ValidateCommand

COMMANDS = {
    command.name: command
    for command in (SimulateCommand, ScaledCommand, ValidateCommand, ReproduceCommand, BoundsCommand)
}

__all__ = [
    "Command",
    "COMMANDS",
    "EXIT_OK",
    "EXIT_ERROR",
    "EXIT_VALIDATION_FAILED",
    "BoundsCommand",
    "ReproduceCommand",
    "ScaledCommand",
    "SimulateCommand",
    "ValidateCommand"
]
