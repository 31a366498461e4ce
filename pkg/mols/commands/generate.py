"""
Generation commands: Latin squares, minisquares and composition orbits.
"""

import logging

from mols.commands import (
    EXIT_OK,
    CommandError,
    add_field_arguments,
    add_format_argument,
    basis_from_args,
    curve_from_lambda,
    emit_json,
    load_curve_file,
    parse_lambda,
)
from mols.services.curves import Curve, CurveError, desarguesian_bundle
from mols.services.latin import (
    minisquare,
    minisquare_commutative,
    nonstandard_ls,
    standard_grid,
    standard_ls,
    standardize,
)
from mols.services.transforms import orbit

logger = logging.getLogger(__name__)


def register(subparsers, app) -> None:
    parser = subparsers.add_parser('generate', help='Build Latin squares from curves')
    add_field_arguments(parser, required=False)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--bundle', choices=('desarguesian',), help='Build every square of a bundle')
    source.add_argument('--curve', help='Desarguesian member lambda=K, f(alpha) = sigma^K alpha')
    source.add_argument('--gamma', metavar='FILE', help='Curve JSON (gamma, phi or gamma_alpha/gamma_beta)')
    parser.add_argument('--standardize', action='store_true',
                        help='Standardize squares of parametric curves')
    parser.add_argument('--diagnostic', action='store_true',
                        help='Print the raw grid of a singular curve instead of failing')
    add_format_argument(parser)
    parser.set_defaults(handler=handle_generate)

    parser = subparsers.add_parser('minisquare', help='Minisquare and trace-symmetry test of a curve')
    add_field_arguments(parser, required=False)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--curve', help='Desarguesian member lambda=K')
    source.add_argument('--gamma', metavar='FILE', help='Curve JSON')
    add_format_argument(parser)
    parser.set_defaults(handler=handle_minisquare)

    parser = subparsers.add_parser('orbit', help='Composition orbit of a seed curve')
    add_field_arguments(parser, required=False)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--seed', help='Desarguesian seed lambda=K')
    source.add_argument('--gamma', metavar='FILE', help='Seed curve JSON')
    add_format_argument(parser)
    parser.set_defaults(handler=handle_orbit)


def _explicit_curve(args, app, flag: str) -> Curve:
    if args.gamma:
        basis = basis_from_args(args, app) if args.p is not None else None
        curve = load_curve_file(args.gamma, '--gamma', basis)
        if not isinstance(curve, Curve):
            raise CommandError("--gamma: an explicit curve (gamma or phi) is required here")
        return curve
    basis = basis_from_args(args, app)
    return curve_from_lambda(basis, parse_lambda(getattr(args, flag), f'--{flag}'), f'--{flag}')


def _emit_squares(app, args, basis, entries) -> None:
    if args.format == 'json':
        emit_json(app, {
            'field': basis.to_dict(),
            'squares': [{'curve': curve.to_dict(), 'grid': grid.tolist()} for curve, grid in entries],
        })
        return
    for index, (_, grid) in enumerate(entries):
        if index:
            app.emit()
        app.emit(_grid_text(grid))


def _grid_text(grid) -> str:
    return '\n'.join(' '.join(str(x) for x in row) for row in grid.tolist())


def handle_generate(app, args) -> int:
    if args.bundle:
        basis = basis_from_args(args, app)
        curves = desarguesian_bundle(basis)
    elif args.curve:
        basis = basis_from_args(args, app)
        curves = [curve_from_lambda(basis, parse_lambda(args.curve, '--curve'), '--curve')]
    else:
        basis = basis_from_args(args, app) if args.p is not None else None
        curves = [load_curve_file(args.gamma, '--gamma', basis)]
        basis = curves[0].basis

    entries = []
    for curve in curves:
        try:
            if isinstance(curve, Curve):
                if args.diagnostic and not curve.is_invertible:
                    entries.append((curve, standard_grid(curve)))
                    continue
                entries.append((curve, standard_ls(curve).grid))
            else:
                square = nonstandard_ls(curve)
                if args.standardize:
                    square, _ = standardize(square, curve)
                entries.append((curve, square.grid))
        except CurveError as e:
            raise CommandError(f"{str(e)} (use --diagnostic for the raw grid)")
    _emit_squares(app, args, basis, entries)
    return EXIT_OK


def handle_minisquare(app, args) -> int:
    curve = _explicit_curve(args, app, 'curve')
    ms = minisquare(curve)
    commutative = minisquare_commutative(ms)
    if args.format == 'json':
        data = ms.to_dict()
        data.update({'curve': curve.to_dict(), 'commutative': commutative})
        emit_json(app, data)
        return EXIT_OK
    for row in ms.grid:
        app.emit(' '.join(str(x) for x in row))
    app.emit()
    for row in ms.trace_matrix().tolist():
        app.emit(' '.join(str(x) for x in row))
    app.emit()
    app.emit('commutative' if commutative else 'not commutative')
    return EXIT_OK


def handle_orbit(app, args) -> int:
    seed = _explicit_curve(args, app, 'seed')
    try:
        members = orbit(seed)
    except CurveError as e:
        raise CommandError(f"--seed: {str(e)}")
    if args.format == 'json':
        emit_json(app, {
            'seed': seed.to_dict(),
            'length': len(members),
            'members': [
                {'curve': curve.to_dict(), 'relabeling': triple.to_dict()} for curve, triple in members
            ],
        })
        return EXIT_OK
    app.emit(f"length {len(members)}")
    for index, (curve, triple) in enumerate(members):
        cycles = ' '.join('(' + ' '.join(str(x) for x in c) + ')' for c in triple.cycles()['rows'])
        app.emit(f"{index} {curve.gamma.tolist()} rows {cycles or '()'}")
    return EXIT_OK
