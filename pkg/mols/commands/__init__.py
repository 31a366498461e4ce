"""
Command package for the MOLS toolkit.

Each module registers one group of verbs on the shared argument parser:
- field: field tables, basis and traces
- generate: squares, minisquares and composition orbits
- transform: CNOT and local operations on a bundle
- verify: orthogonality, completeness, MUB and Hall checks
- reproduce: golden fixture reproduction

Handlers receive the application and the parsed arguments and return an
exit code.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

from mols.services.curves import Curve, CurveError, curve_from_dict, slope_curve
from mols.services.gf_engine import FieldError, SelfDualBasis, create_field

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'fixtures')
FIXTURE_NAMES = ('a1', 'a2', 'hall')


class CommandError(Exception):
    """Custom exception for invalid command input."""
    pass


def parse_int_list(text: str, flag: str) -> List[int]:
    """Parse '1,2,3' into integers."""
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise CommandError(f"{flag}: expected comma-separated integers, got {text!r}")


def parse_lambda(text: str, flag: str) -> int:
    """Parse 'lambda=K' (or a bare K) into the slope exponent K."""
    value = text.split('=', 1)[1] if '=' in text else text
    try:
        return int(value)
    except ValueError:
        raise CommandError(f"{flag}: expected lambda=K, got {text!r}")


def add_field_arguments(parser, required: bool = True) -> None:
    parser.add_argument('--p', type=int, required=required, help='Field characteristic')
    parser.add_argument('--n', type=int, required=required, help='Extension degree')
    parser.add_argument('--poly', help='Defining polynomial coefficients c0,c1,...,cn (constant first)')


def add_format_argument(parser) -> None:
    parser.add_argument(
        '--format',
        choices=('text', 'json'),
        default='text',
        help='Output format (default: text)'
    )


def basis_from_args(args, app) -> SelfDualBasis:
    """
    Build the field basis named by --p/--n/--poly.

    Raises:
        CommandError: If the flags are missing or describe no valid field
    """
    if args.p is None or args.n is None:
        raise CommandError("--p and --n are required")
    poly = parse_int_list(args.poly, '--poly') if getattr(args, 'poly', None) else None
    try:
        return create_field(args.p, args.n, poly, max_order=app.config['MAX_ORDER'])
    except FieldError as e:
        raise CommandError(f"--p/--n/--poly: {str(e)}")


def curve_from_lambda(basis: SelfDualBasis, lam: int, flag: str) -> Curve:
    if not 1 <= lam < basis.field.order:
        raise CommandError(f"{flag}: lambda must be in 1..{basis.field.order - 1}, got {lam}")
    return slope_curve(basis, lam)


def load_json(path: str, flag: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            return json.load(handle)
    except (OSError, ValueError) as e:
        logger.error(f"Failed to read {path}: {str(e)}")
        raise CommandError(f"{flag}: cannot read {path}: {str(e)}")


def load_curve_file(path: str, flag: str, basis: Optional[SelfDualBasis] = None):
    """Curve JSON with its own 'field' entry, or interpreted over the given basis."""
    data = load_json(path, flag)
    try:
        if 'field' in data or basis is None:
            return curve_from_dict(data)
        return curve_from_dict(data, basis)
    except (CurveError, FieldError) as e:
        raise CommandError(f"{flag}: {str(e)}")


def load_fixture(name: str) -> Dict[str, Any]:
    """Golden data shipped with the package."""
    if name not in FIXTURE_NAMES:
        raise CommandError(f"Unknown fixture {name!r}; expected one of {', '.join(FIXTURE_NAMES)}")
    return load_json(os.path.join(FIXTURE_DIR, f'{name}.json'), name)


def emit_json(app, data: Any) -> None:
    app.emit(json.dumps(data, indent=2, ensure_ascii=False))
