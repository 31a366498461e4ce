"""
Field command: print the label table, basis and traces of GF(p^n).
"""

import logging

from mols.commands import add_field_arguments, add_format_argument, basis_from_args, emit_json, EXIT_OK

logger = logging.getLogger(__name__)


def register(subparsers, app) -> None:
    parser = subparsers.add_parser('field', help='Show GF(p^n) labels, basis and traces')
    add_field_arguments(parser)
    add_format_argument(parser)
    parser.set_defaults(handler=handle_field)


def field_table(basis):
    """One row per element: polynomial coordinates, s-vector and trace."""
    return [
        {
            'label': element.label,
            'element': str(element),
            'coeffs': list(element.coeffs),
            'svector': [int(s) for s in basis.svector(element)],
            'trace': basis.field.trace(element),
        }
        for element in map(basis.field.element, range(basis.field.order))
    ]


def handle_field(app, args) -> int:
    basis = basis_from_args(args, app)
    rows = field_table(basis)
    if args.format == 'json':
        emit_json(app, {'field': basis.to_dict(), 'elements': rows})
        return EXIT_OK

    spec = basis.field.spec
    app.emit(f"GF({spec.p}^{spec.n}) poly {' '.join(str(c) for c in spec.poly)}")
    app.emit(f"theta {' '.join(str(t) for t in basis.theta)} c {' '.join(str(c) for c in basis.c)}")
    for row in rows:
        app.emit(
            f"{row['label']} {''.join(str(c) for c in row['coeffs'])} "
            f"{''.join(str(s) for s in row['svector'])} {row['trace']}"
        )
    return EXIT_OK
