"""Command-line front end"""

from .commands import COMMANDS
from .main import main

__all__ = ["COMMANDS", "main"]
