"""
Verify command: orthogonality, completeness, mutual unbiasedness and the Hall check.
"""

import itertools
import logging
import os

from mols.commands import (
    EXIT_FAILED,
    EXIT_OK,
    CommandError,
    add_field_arguments,
    add_format_argument,
    basis_from_args,
    emit_json,
    load_fixture,
)
from mols.services.curves import Curve, desarguesian_bundle
from mols.services.gf_engine import basis_from_dict
from mols.services.latin import (
    LatinSquareError,
    MolsSet,
    are_orthogonal,
    is_complete_mols,
    load_square,
    minisquare,
    minisquare_commutative,
    write_occupancy_csv,
)
from mols.services.monomials import NotCommutative, bundle_is_mub, curve_commuting_set, numeric_unbiasedness

logger = logging.getLogger(__name__)

SQUARE_EXTENSIONS = ('.txt', '.json')


def register(subparsers, app) -> None:
    parser = subparsers.add_parser('verify', help='Check orthogonality, completeness, MUBs or the Hall curve')
    check = parser.add_mutually_exclusive_group(required=True)
    check.add_argument('--orthogonal', nargs='+', metavar='FILE', help='Square files to test pairwise')
    check.add_argument('--complete', metavar='DIR', help='Directory of square files forming a complete set')
    check.add_argument('--mub', action='store_true', help='MUB check of the Desarguesian bundle over --p/--n')
    check.add_argument('--hall-fixture', action='store_true', help='Commutativity check of the Hall curve')
    parser.add_argument('--csv', metavar='DIR',
                        help='With --orthogonal, write the pair occupancy of each failing pair as CSV')
    add_field_arguments(parser, required=False)
    parser.add_argument('--tol', type=float, default=app.config['MUB_TOLERANCE'],
                        help='Bound on the overlap deviation in the numeric MUB check')
    parser.add_argument('--seed', type=int, default=app.config['RNG_SEED'],
                        help='Seed for the numeric MUB check')
    add_format_argument(parser)
    parser.set_defaults(handler=handle_verify)


def _load_squares(paths):
    try:
        return [load_square(path) for path in paths]
    except LatinSquareError as e:
        raise CommandError(str(e))


def _write_occupancy(directory, index_a, index_b, a, b) -> str:
    path = os.path.join(directory, f"occupancy_{index_a}_{index_b}.csv")
    try:
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            write_occupancy_csv(a, b, handle)
    except OSError as e:
        logger.error(f"Failed to write {path}: {str(e)}")
        raise CommandError(f"--csv: cannot write {path}: {str(e)}")
    logger.info(f"Wrote pair occupancy to {path}")
    return path


def verify_orthogonal(app, args) -> int:
    if len(args.orthogonal) < 2:
        raise CommandError("--orthogonal: at least two square files are required")
    squares = _load_squares(args.orthogonal)
    if len({square.d for square in squares}) != 1:
        raise CommandError("--orthogonal: squares have different orders")
    failing = [
        (a, b)
        for a, b in itertools.combinations(range(len(squares)), 2)
        if not are_orthogonal(squares[a], squares[b])
    ]
    failures = [(args.orthogonal[a], args.orthogonal[b]) for a, b in failing]
    csv_paths = []
    if args.csv:
        csv_paths = [_write_occupancy(args.csv, a, b, squares[a], squares[b]) for a, b in failing]
    if args.format == 'json':
        emit_json(app, {
            'orthogonal': not failures,
            'failures': [list(pair) for pair in failures],
            'occupancy': csv_paths,
        })
    elif failures:
        for a, b in failures:
            app.emit(f"not orthogonal: {a} {b}")
        for path in csv_paths:
            app.emit(f"occupancy: {path}")
    else:
        app.emit('orthogonal')
    return EXIT_FAILED if failures else EXIT_OK


def verify_complete(app, args) -> int:
    if not os.path.isdir(args.complete):
        raise CommandError(f"--complete: {args.complete} is not a directory")
    paths = sorted(
        os.path.join(args.complete, name)
        for name in os.listdir(args.complete)
        if name.endswith(SQUARE_EXTENSIONS)
    )
    if not paths:
        raise CommandError(f"--complete: no square files in {args.complete}")
    squares = _load_squares(paths)
    if len({square.d for square in squares}) != 1:
        raise CommandError("--complete: squares have different orders")
    complete = is_complete_mols(MolsSet(squares=tuple(squares)))
    if args.format == 'json':
        emit_json(app, {'complete': complete, 'squares': len(squares), 'd': squares[0].d})
    else:
        app.emit('complete' if complete else 'not complete')
    return EXIT_OK if complete else EXIT_FAILED


def verify_mub(app, args) -> int:
    basis = basis_from_args(args, app)
    bundle = desarguesian_bundle(basis)
    result = {'d': basis.field.order, 'partition': bundle_is_mub(bundle)}
    passed = result['partition']
    if basis.field.order <= app.config['NUMERIC_MAX_ORDER']:
        report = numeric_unbiasedness(
            bundle,
            tol=args.tol,
            seed=args.seed,
            orthonormal_tol=app.config['ORTHONORMAL_TOLERANCE'],
            max_order=app.config['NUMERIC_MAX_ORDER'],
        )
        result['numeric'] = report.to_dict()
        passed = passed and report.passed
    else:
        logger.info(f"Skipping numeric check for d={basis.field.order}")
    if args.format == 'json':
        emit_json(app, result)
    else:
        app.emit('mutually unbiased' if passed else 'not mutually unbiased')
        if 'numeric' in result:
            app.emit(f"max deviation {result['numeric']['max_deviation']:.3e}")
    return EXIT_OK if passed else EXIT_FAILED


def verify_hall(app, args) -> int:
    data = load_fixture('hall')
    curve = Curve(basis_from_dict(data['field']), data['gamma'], name='hall')
    minisquare_symmetric = minisquare_commutative(minisquare(curve))
    try:
        curve_commuting_set(curve)
        commutative = True
    except NotCommutative as e:
        logger.info(str(e))
        commutative = False
    if args.format == 'json':
        emit_json(app, {
            'gamma': curve.gamma.tolist(),
            'invertible': curve.is_invertible,
            'minisquare_commutative': minisquare_symmetric,
            'commutative': commutative,
        })
    else:
        app.emit('commutative' if commutative and minisquare_symmetric else 'not commutative')
    return EXIT_OK if commutative and minisquare_symmetric else EXIT_FAILED


def handle_verify(app, args) -> int:
    if args.orthogonal:
        return verify_orthogonal(app, args)
    if args.complete:
        return verify_complete(app, args)
    if args.mub:
        return verify_mub(app, args)
    return verify_hall(app, args)
