#!/usr/bin/env python3
"""
Main entry point for the MOLS toolkit.

This module builds the application with the factory, dispatches the parsed
command and maps failures onto exit codes: 0 success, 1 verification
failure, 2 usage or input error.
"""

import sys
from typing import Optional, Sequence, TextIO

from mols import create_app
from mols.commands import EXIT_USAGE, CommandError
from mols.services.curves import CurveError
from mols.services.gf_engine import FieldError
from mols.services.latin import LatinSquareError
from mols.services.monomials import MonomialError
from mols.services.transforms import TransformError

INPUT_ERRORS = (CommandError, FieldError, CurveError, LatinSquareError, TransformError, MonomialError)


def parse_args(app, argv: Optional[Sequence[str]] = None):
    """Parse command-line arguments with the application's parser."""
    return app.parser.parse_args(argv)


def run(argv: Optional[Sequence[str]] = None, test_config=None, stdout: Optional[TextIO] = None) -> int:
    """
    Run one command.

    Args:
        argv (Sequence[str], optional): Arguments without the program name.
        test_config (dict, optional): Configuration overrides.
        stdout (TextIO, optional): Stream for structured output.

    Returns:
        int: Exit code.
    """
    app = create_app(test_config, stdout=stdout)
    try:
        args = parse_args(app, argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        return args.handler(app, args)
    except INPUT_ERRORS as e:
        app.logger.error(f"{args.command}: {str(e)}")
        print(f"mols {args.command}: error: {str(e)}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()
