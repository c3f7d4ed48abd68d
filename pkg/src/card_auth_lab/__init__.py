"""
Card Authentication Lab

Executable models of five smart-card password authentication schemes, the
attacks that break them, and a protocol x requirement verdict matrix.
"""

import logging
import sys
from typing import NoReturn

__version__ = "0.1.0"


def main() -> NoReturn:
    """
    Main entry point for the card-auth-lab console script.

    Delegates to the Typer application in cli.py, which configures logging,
    validates flags and maps failures to exit codes.

    Raises:
        SystemExit: always, carrying the command's exit code
    """
    logger = logging.getLogger(__name__)

    try:
        from .cli import app
    except ImportError as e:
        logger.error(f"Failed to import CLI module: {e}")
        sys.exit(1)
    app()
    sys.exit(0)
