"""
Reproduce command: recompute every golden artifact and compare it to the shipped fixture.
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from mols.commands import EXIT_FAILED, EXIT_OK, FIXTURE_NAMES, add_format_argument, emit_json, load_fixture
from mols.services.curves import (
    ParametricCurve,
    curve_from_phi,
    desarguesian_bundle,
    generator_matrix,
    identity_curve,
    parametric_to_explicit,
    slope_curve,
)
from mols.services.gf_engine import basis_from_dict
from mols.services.latin import (
    apply_triple,
    create_mols,
    is_complete_mols,
    minisquare,
    minisquare_commutative,
    nonstandard_ls,
    standard_ls,
    standardize,
)
from mols.services.monomials import NotCommutative, curve_commuting_set, monomial_from_point
from mols.services.transforms import (
    CnotOp,
    LocalKind,
    LocalOp,
    apply_local_to_generator,
    cnot_on_curve,
    cnot_parametric,
    cnot_qubit_curve_formula,
    local_on_curve,
    local_perms,
    orbit,
    perms_nonstandard_to_standard,
    perms_standard_to_standard,
    perms_to_original,
    transform_bundle,
)

logger = logging.getLogger(__name__)


def register(subparsers, app) -> None:
    parser = subparsers.add_parser('reproduce', help='Recompute and check a golden fixture')
    parser.add_argument('fixture', choices=FIXTURE_NAMES, help='Fixture to reproduce')
    add_format_argument(parser)
    parser.set_defaults(handler=handle_reproduce)


class Checks:
    """Ordered list of named pass/fail results."""

    def __init__(self):
        self.results: List[Tuple[str, bool]] = []

    def equal(self, name: str, actual: Any, expected: Any) -> None:
        ok = _plain(actual) == _plain(expected)
        if not ok:
            logger.error(f"{name}: expected {_plain(expected)}, computed {_plain(actual)}")
        self.results.append((name, ok))

    def true(self, name: str, condition: bool) -> None:
        if not condition:
            logger.error(f"{name}: check failed")
        self.results.append((name, bool(condition)))

    def cycles(self, name: str, triple, expected: Dict[str, List[List[int]]]) -> None:
        actual = triple.cycles()
        for component in ('rows', 'cols', 'symbols'):
            self.equal(f"{name}.{component}", actual[component], expected[component])

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.results)


def _plain(value: Any) -> Any:
    """Nested lists of Python scalars, so arrays, tuples and lists compare equal."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _field_checks(checks: Checks, basis, data: Dict[str, Any]) -> None:
    field = basis.field
    checks.equal('powers', [field.coeffs(label) for label in range(field.order)], data['powers'])
    checks.equal('traces', [field.trace(label) for label in range(field.order)], data['traces'])


def reproduce_a1(checks: Checks, data: Dict[str, Any]) -> None:
    basis = basis_from_dict(data['field'])
    _field_checks(checks, basis, data)

    identity = identity_curve(basis)
    checks.equal('identity_square', standard_ls(identity).grid, data['identity_square'])
    ms = minisquare(identity)
    checks.equal('identity_minisquare', ms.grid, data['identity_minisquare']['grid'])
    checks.equal('identity_minisquare.trace', ms.trace_matrix(), data['identity_minisquare']['trace_matrix'])

    cnot = data['cnot']
    op = CnotOp(cnot['op']['p'], cnot['op']['q'], cnot['op']['m'])
    f = slope_curve(basis, cnot['lambda'])
    g = cnot_on_curve(f, op)
    checks.equal('cnot.gamma', f.gamma, cnot['gamma'])
    checks.equal('cnot.matrix', op.matrix(basis.n, basis.p), cnot['matrix'])
    checks.equal('cnot.transformed_gamma', g.gamma, cnot['transformed_gamma'])

    nonstandard = nonstandard_ls(cnot_parametric(f, op))
    standard = standard_ls(g)
    checks.equal('cnot.nonstandard_square', nonstandard.grid, cnot['nonstandard_square'])
    checks.equal('cnot.standard_square', standard.grid, cnot['standard_square'])

    triple = perms_nonstandard_to_standard(basis, op)
    checks.cycles('cnot.nonstandard_to_standard', triple, cnot['nonstandard_to_standard'])
    checks.true('cnot.nonstandard_to_standard.apply', apply_triple(nonstandard, triple) == standard)
    triple = perms_to_original(basis, op)
    checks.cycles('cnot.to_original', triple, cnot['to_original'])
    checks.true('cnot.to_original.apply', apply_triple(nonstandard, triple) == standard_ls(f))
    triple = perms_standard_to_standard(basis, op)
    checks.cycles('cnot.standard_to_standard', triple, cnot['standard_to_standard'])
    checks.true('cnot.standard_to_standard.apply', apply_triple(standard, triple) == standard_ls(f))

    for row in data['qubit_cnot_phi']:
        original = slope_curve(basis, row['lambda'])
        pointwise = cnot_qubit_curve_formula(original, op)
        checks.equal(f"qubit_cnot_phi.{row['lambda']}.phi", pointwise.phi(), row['phi'])
        checks.true(f"qubit_cnot_phi.{row['lambda']}.gamma", pointwise == cnot_on_curve(original, op))

    bundle = desarguesian_bundle(basis)
    checks.true('bundle.complete', is_complete_mols(create_mols(bundle)))
    report = transform_bundle(bundle, op)
    checks.true('bundle.cnot_common_triple', report.verdict == 'preserved')

    members = orbit(slope_curve(basis, data['orbit']['seed']))
    checks.equal('orbit.length', len(members), data['orbit']['length'])
    checks.equal('orbit.rows', members[1][1].cycles()['rows'], data['orbit']['rows'])


def reproduce_a2(checks: Checks, data: Dict[str, Any]) -> None:
    basis = basis_from_dict(data['field'])
    _field_checks(checks, basis, data)
    for lam, gamma in data['gammas'].items():
        checks.equal(f"gamma.{lam}", slope_curve(basis, int(lam)).gamma, gamma)

    param = data['parametric']
    pc = ParametricCurve(basis, param['gamma_alpha'], param['gamma_beta'])
    explicit = slope_curve(basis, param['explicit_lambda'])
    checks.true('parametric.explicit', parametric_to_explicit(pc) == explicit)
    nonstandard = nonstandard_ls(pc)
    checks.equal('parametric.nonstandard_square', nonstandard.grid, param['nonstandard_square'])
    standard, triple = standardize(nonstandard, pc)
    checks.true('parametric.standardized', standard == standard_ls(explicit))
    checks.cycles('parametric.standardization', triple, param['standardization'])

    cnot = data['cnot']
    op = CnotOp(cnot['op']['p'], cnot['op']['q'], cnot['op']['m'])
    f = slope_curve(basis, cnot['lambda'])
    checks.equal('cnot.matrix', op.matrix(basis.n, basis.p), cnot['matrix'])
    checks.equal('cnot.inverse_matrix', op.matrix(basis.n, basis.p, sign=-1), cnot['inverse_matrix'])
    checks.equal('cnot.transformed_gamma', cnot_on_curve(f, op).gamma, cnot['transformed_gamma'])
    nonstandard = nonstandard_ls(cnot_parametric(f, op))
    checks.equal('cnot.nonstandard_square', nonstandard.grid, cnot['nonstandard_square'])
    triple = perms_to_original(basis, op)
    checks.cycles('cnot.to_original', triple, cnot['to_original'])
    checks.true('cnot.to_original.apply', apply_triple(nonstandard, triple) == standard_ls(f))

    local = data['local']
    f = slope_curve(basis, local['lambda'])
    A = generator_matrix(f, local['generators'])
    checks.equal('local.generator_matrix', A.A, local['generator_matrix'])
    texts = [monomial_from_point(basis, x, f.evaluate(x)).text() for x in local['generators']]
    checks.equal('local.generator_text', texts, local['generator_text'])
    op = LocalOp(LocalKind(local['kind']), tuple(local['k']))
    K = op.k_matrix(basis.p)
    checks.equal('local.k_matrix', K.K, local['k_matrix'])
    checks.equal('local.transformed_generator_matrix', apply_local_to_generator(A, K).A,
                 local['transformed_generator_matrix'])
    pc = local_on_curve(f, op)
    checks.true('local.fixed_point', parametric_to_explicit(pc) == f)
    checks.true('local.triple.apply', apply_triple(nonstandard_ls(pc), local_perms(basis, op)) == standard_ls(f))

    members = orbit(slope_curve(basis, data['orbit']['seed']))
    checks.equal('orbit.length', len(members), data['orbit']['length'])


def reproduce_hall(checks: Checks, data: Dict[str, Any]) -> None:
    basis = basis_from_dict(data['field'])
    curve = curve_from_phi(basis, data['phi'], name='hall')
    checks.equal('gamma', curve.gamma, data['gamma'])
    checks.true('invertible', curve.is_invertible)
    checks.equal('square', standard_ls(curve).grid, data['square'])
    ms = minisquare(curve)
    checks.equal('minisquare', ms.grid, data['minisquare']['grid'])
    checks.equal('minisquare.row_labels', ms.row_labels, data['minisquare']['row_labels'])
    checks.equal('minisquare.col_labels', ms.col_labels, data['minisquare']['col_labels'])
    checks.equal('minisquare.commutative', minisquare_commutative(ms), data['commutative'])
    try:
        curve_commuting_set(curve)
        commutative = True
    except NotCommutative:
        commutative = False
    checks.equal('commuting_set', commutative, data['commutative'])


REPRODUCERS = {
    'a1': reproduce_a1,
    'a2': reproduce_a2,
    'hall': reproduce_hall,
}


def handle_reproduce(app, args) -> int:
    data = load_fixture(args.fixture)
    checks = Checks()
    REPRODUCERS[args.fixture](checks, data)
    if args.format == 'json':
        emit_json(app, {
            'fixture': args.fixture,
            'passed': checks.passed,
            'checks': [{'name': name, 'ok': ok} for name, ok in checks.results],
        })
    else:
        for name, ok in checks.results:
            app.emit(f"{'ok' if ok else 'MISMATCH'} {name}")
        failed = sum(1 for _, ok in checks.results if not ok)
        app.emit(f"{args.fixture}: {len(checks.results) - failed}/{len(checks.results)} checks passed")
    return EXIT_OK if checks.passed else EXIT_FAILED
