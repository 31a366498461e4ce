"""
MOLS toolkit application factory module.

This module provides the application factory that builds the configuration,
logging and command registry used by the command-line entry point.
"""

import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional, TextIO

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

LOG_FORMAT = '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'


class MolsApp:
    """Configured application: config mapping, package logger and argument parser."""

    def __init__(self, stdout: Optional[TextIO] = None):
        self.config: Dict[str, Any] = {}
        self.logger = logging.getLogger('mols')
        self.parser: Optional[argparse.ArgumentParser] = None
        self.stdout = stdout if stdout is not None else sys.stdout

    def emit(self, text: str = '') -> None:
        """Write one line of structured output."""
        print(text, file=self.stdout)


def create_app(test_config=None, stdout: Optional[TextIO] = None) -> MolsApp:
    """
    Create and configure the application.

    Args:
        test_config (dict, optional): Test configuration to override default configs.
        stdout (TextIO, optional): Stream for structured output.

    Returns:
        MolsApp: Configured application instance.
    """
    app = MolsApp(stdout=stdout)

    # Load default configuration
    app.config.update(
        ENV=os.environ.get('MOLS_ENV', 'development'),
        LOG_LEVEL=os.environ.get('LOG_LEVEL', 'WARNING'),
        LOG_DIR=os.environ.get('MOLS_LOG_DIR', 'logs'),
        MUB_TOLERANCE=float(os.environ.get('MOLS_MUB_TOLERANCE', 1e-9)),
        ORTHONORMAL_TOLERANCE=float(os.environ.get('MOLS_ORTHONORMAL_TOLERANCE', 1e-10)),
        RNG_SEED=int(os.environ.get('MOLS_RNG_SEED', 1729)),
        MAX_ORDER=int(os.environ.get('MOLS_MAX_ORDER', 1024)),
        NUMERIC_MAX_ORDER=int(os.environ.get('MOLS_NUMERIC_MAX_ORDER', 32)),
    )

    # Override config with test config if provided
    if test_config is not None:
        app.config.update(test_config)

    configure_logging(app)
    register_commands(app)
    return app


def configure_logging(app: MolsApp) -> None:
    """
    Configure package logging based on environment.

    Args:
        app (MolsApp): Application instance.
    """
    log_level = getattr(logging, str(app.config['LOG_LEVEL']).upper(), logging.WARNING)

    for handler in list(app.logger.handlers):
        app.logger.removeHandler(handler)
        handler.close()

    if app.config['ENV'] == 'production':
        # In production, log to file with rotation
        os.makedirs(app.config['LOG_DIR'], exist_ok=True)
        handler = RotatingFileHandler(
            os.path.join(app.config['LOG_DIR'], 'mols.log'),
            maxBytes=10485760,  # 10MB
            backupCount=10
        )
    else:
        # Diagnostics only; standard output is reserved for results
        handler = logging.StreamHandler(sys.stderr)

    handler.setLevel(log_level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    app.logger.addHandler(handler)
    app.logger.setLevel(log_level)
    app.logger.propagate = False
    app.logger.debug(f'MOLS toolkit startup with {app.config["ENV"]} configuration')


def register_commands(app: MolsApp) -> None:
    """
    Build the argument parser and register every command group.

    Args:
        app (MolsApp): Application instance.
    """
    # Import commands here to avoid circular imports
    from mols.commands import field, generate, reproduce, transform, verify

    parser = argparse.ArgumentParser(
        prog='mols',
        description='Construct, transform and verify MOLS from additive curves over GF(p^n)',
    )
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    for module in (field, generate, transform, verify, reproduce):
        module.register(subparsers, app)
        app.logger.debug(f"Registered {module.__name__} commands")
    app.parser = parser
