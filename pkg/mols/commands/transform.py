"""
Transform command: apply a CNOT or local operation to every curve of a bundle.
"""

import logging

from mols.commands import (
    EXIT_FAILED,
    EXIT_OK,
    CommandError,
    emit_json,
    load_json,
    parse_int_list,
)
from mols.services.curves import Curve, CurveError, bundle_from_dict, curve_from_dict
from mols.services.gf_engine import FieldError
from mols.services.latin import nonstandard_ls, standard_ls
from mols.services.transforms import (
    CnotOp,
    LocalKind,
    LocalOp,
    TransformError,
    cnot_on_curve,
    local_on_curve,
    mixed_sf_breaks_bundle,
    transform_bundle,
)

logger = logging.getLogger(__name__)


def register(subparsers, app) -> None:
    parser = subparsers.add_parser('transform', help='Apply a CNOT or local operation to a bundle')
    operation = parser.add_mutually_exclusive_group(required=True)
    operation.add_argument('--cnot', metavar='P,Q,M', help='X^M with control P and target Q (1-based)')
    operation.add_argument(
        '--local',
        metavar='KIND:k1,...,kn',
        help='S:k1,...,kn or F:k1,...,kn; one kind per qudit (e.g. SF:1,1) checks a mixed assignment'
    )
    parser.add_argument('--in', dest='input', metavar='FILE', required=True,
                        help='Bundle JSON {"field", "curves"} or a single curve JSON with "field"')
    parser.add_argument(
        '--emit',
        choices=('squares', 'perms', 'report'),
        default='report',
        help='What to print (default: report)'
    )
    parser.set_defaults(handler=handle_transform)


def parse_cnot(text: str) -> CnotOp:
    values = parse_int_list(text, '--cnot')
    if len(values) != 3:
        raise CommandError(f"--cnot: expected P,Q,M, got {text!r}")
    return CnotOp(*values)


def parse_local(text: str, n: int):
    """Uniform LocalOp, or (kinds, ks) for a mixed assignment."""
    if ':' not in text:
        raise CommandError(f"--local: expected KIND:k1,...,kn, got {text!r}")
    kinds_text, ks_text = text.split(':', 1)
    ks = parse_int_list(ks_text, '--local')
    if len(ks) != n:
        raise CommandError(f"--local: {len(ks)} parameters for {n} qudits")
    try:
        kinds = [LocalKind(k) for k in kinds_text.upper()]
    except ValueError:
        raise CommandError(f"--local: kinds must be S or F, got {kinds_text!r}")
    if len(kinds) == 1:
        kinds = kinds * n
    if len(kinds) != n:
        raise CommandError(f"--local: {len(kinds)} kinds for {n} qudits")
    if len(set(kinds)) == 1:
        return LocalOp.from_assignment(kinds, ks)
    return kinds, ks


def _load_bundle(path: str):
    data = load_json(path, '--in')
    try:
        if 'curves' in data:
            bundle = bundle_from_dict(data)
        else:
            bundle = [curve_from_dict(data)]
    except (CurveError, FieldError) as e:
        raise CommandError(f"--in: {str(e)}")
    if not all(isinstance(curve, Curve) for curve in bundle):
        raise CommandError("--in: bundle members must be explicit curves")
    return bundle


def handle_transform(app, args) -> int:
    bundle = _load_bundle(args.input)
    n = bundle[0].basis.n
    try:
        op = parse_cnot(args.cnot) if args.cnot else parse_local(args.local, n)
        if isinstance(op, tuple):
            if args.emit == 'squares':
                raise CommandError("--emit squares: a mixed S/F assignment has no squares to emit")
            report = mixed_sf_breaks_bundle(bundle, *op)
        else:
            report = transform_bundle(bundle, op)
    except TransformError as e:
        raise CommandError(f"{'--cnot' if args.cnot else '--local'}: {str(e)}")

    if args.emit == 'report':
        emit_json(app, report.to_dict())
    elif args.emit == 'perms':
        emit_json(app, None if report.triple is None else report.triple.to_dict())
    else:
        for index, curve in enumerate(bundle):
            if isinstance(op, CnotOp):
                square = standard_ls(cnot_on_curve(curve, op))
            else:
                square = nonstandard_ls(local_on_curve(curve, op))
            if index:
                app.emit()
            app.emit(square.to_text().rstrip('\n'))

    if report.verdict != 'preserved':
        logger.warning(f"Bundle {report.verdict}: {report.degenerate_count} degenerate curves")
        return EXIT_FAILED
    return EXIT_OK
