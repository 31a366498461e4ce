"""
Tests for CNOT and local transformations, composition and orbits.
"""

import itertools
from typing import Tuple, get_args, get_type_hints

import numpy as np
import pytest

from mols.services.curves import (
    Curve,
    Degenerate,
    desarguesian_bundle,
    generator_matrix,
    identity_curve,
    parametric_to_explicit,
    slope_curve,
)
from mols.services.gf_engine import create_field
from mols.services.latin import apply_triple, nonstandard_ls, standard_ls
from mols.services.transforms import (
    CnotOp,
    IncompatibleOps,
    LocalKind,
    LocalOp,
    MixedKind,
    NotQubit,
    TransformError,
    apply_local_to_generator,
    cnot_k_matrix,
    cnot_matrix,
    cnot_on_curve,
    cnot_parametric,
    cnot_qubit_curve_formula,
    compose_ops,
    k_matrix,
    local_on_curve,
    local_perms,
    mixed_sf_breaks_bundle,
    op_k_matrix,
    orbit,
    perms_nonstandard_to_standard,
    perms_standard_to_standard,
    perms_to_original,
    t_map,
    transform_bundle,
)

S, F = LocalKind.S, LocalKind.F

GF8_CNOT_NONSTANDARD = [
    [0, 1, 6, 3, 4, 7, 2, 5],
    [6, 2, 0, 5, 7, 4, 1, 3],
    [2, 6, 1, 7, 5, 3, 0, 4],
    [7, 5, 4, 2, 6, 0, 3, 1],
    [4, 3, 7, 1, 0, 6, 5, 2],
    [5, 7, 3, 6, 2, 1, 4, 0],
    [1, 0, 2, 4, 3, 5, 6, 7],
    [3, 4, 5, 0, 1, 2, 7, 6],
]

GF8_CNOT_STANDARD = [
    [0, 1, 2, 3, 4, 5, 6, 7],
    [6, 2, 1, 5, 7, 3, 0, 4],
    [1, 0, 6, 4, 3, 7, 2, 5],
    [7, 5, 3, 2, 6, 1, 4, 0],
    [4, 3, 5, 1, 0, 2, 7, 6],
    [3, 4, 7, 0, 1, 6, 5, 2],
    [2, 6, 0, 7, 5, 4, 1, 3],
    [5, 7, 4, 6, 2, 0, 3, 1],
]

GF9_CNOT_NONSTANDARD = [
    [0, 6, 3, 5, 4, 2, 7, 1, 8],
    [7, 5, 0, 8, 1, 4, 3, 2, 6],
    [4, 7, 2, 3, 8, 5, 1, 6, 0],
    [6, 2, 8, 4, 7, 0, 5, 3, 1],
    [5, 4, 6, 1, 3, 7, 8, 0, 2],
    [3, 8, 7, 6, 2, 1, 0, 4, 5],
    [8, 1, 5, 2, 0, 3, 6, 7, 4],
    [2, 0, 1, 7, 5, 6, 4, 8, 3],
    [1, 3, 4, 0, 6, 8, 2, 5, 7],
]

# f = sigma^lam alpha -> linearized coefficients of its CNOT image
QUBIT_CNOT_PHI = {
    7: (6, 1, 4),
    1: (1, 0, 0),
    2: (5, 3, 5),
    3: (3, 4, 2),
    4: (4, 4, 2),
    5: (2, 1, 4),
    6: (7, 3, 5),
}


def test_cnot_matrix():
    op = CnotOp(1, 2, 2)
    assert cnot_matrix(op, 2, 3).tolist() == [[1, 2], [0, 1]]
    assert op.matrix(2, 3, sign=-1).tolist() == [[1, 1], [0, 1]]


@pytest.mark.parametrize('op', [CnotOp(1, 1, 1), CnotOp(0, 2, 1), CnotOp(1, 4, 1)])
def test_cnot_rejects_bad_qudits(op):
    with pytest.raises(TransformError):
        op.matrix(3, 2)


def test_cnot_on_curve_gf8(gf8):
    g = cnot_on_curve(identity_curve(gf8), CnotOp(1, 2, 1))
    assert g.gamma.tolist() == [[1, 1, 0], [1, 0, 0], [0, 0, 1]]


def test_cnot_fixes_sigma_alpha_gf8(gf8):
    f = slope_curve(gf8, 1)
    assert cnot_on_curve(f, CnotOp(1, 2, 1)) == f
    assert slope_curve(gf8, 7) == identity_curve(gf8)


def test_cnot_on_curve_gf9(gf9):
    g = cnot_on_curve(slope_curve(gf9, 3), CnotOp(1, 2, 2))
    assert g.gamma.tolist() == [[2, 2], [2, 1]]


def test_gf8_cnot_squares_and_permutations(gf8):
    op = CnotOp(1, 2, 1)
    f = identity_curve(gf8)
    g = cnot_on_curve(f, op)
    nonstandard = nonstandard_ls(cnot_parametric(f, op))
    standard = standard_ls(g)
    assert nonstandard.grid.tolist() == GF8_CNOT_NONSTANDARD
    assert standard.grid.tolist() == GF8_CNOT_STANDARD

    triple = perms_nonstandard_to_standard(gf8, op)
    assert triple.cycles() == {'rows': [[2, 6], [5, 7]], 'cols': [[2, 6], [5, 7]], 'symbols': []}
    assert apply_triple(nonstandard, triple) == standard

    triple = perms_to_original(gf8, op)
    assert triple.cycles() == {'rows': [], 'cols': [[1, 6, 2], [3, 7, 5]], 'symbols': [[1, 6], [3, 7]]}
    assert apply_triple(nonstandard, triple) == standard_ls(f)

    triple = perms_standard_to_standard(gf8, op)
    assert triple.cycles() == {'rows': [[2, 6], [5, 7]], 'cols': [[1, 6], [3, 7]], 'symbols': [[1, 6], [3, 7]]}
    assert apply_triple(standard, triple) == standard_ls(f)


def test_gf9_cnot_square_and_permutations(gf9):
    op = CnotOp(1, 2, 2)
    f = slope_curve(gf9, 3)
    nonstandard = nonstandard_ls(cnot_parametric(f, op))
    assert nonstandard.grid.tolist() == GF9_CNOT_NONSTANDARD
    triple = perms_to_original(gf9, op)
    assert triple.cycles()['cols'] == [[1, 6, 4, 5, 2, 8], [3, 7]]
    assert triple.cycles()['symbols'] == [[1, 3, 8], [4, 5, 7]]
    assert apply_triple(nonstandard, triple) == standard_ls(f)


def _cnots(n, p):
    for control, target in itertools.permutations(range(1, n + 1), 2):
        for power in range(1, p):
            yield CnotOp(control, target, power)


@pytest.mark.parametrize('field_args', [(2, 2), (2, 3), (3, 2)])
def test_cnot_preserves_bundles(field_args):
    basis = create_field(*field_args)
    bundle = desarguesian_bundle(basis)
    for op in _cnots(basis.n, basis.p):
        report = transform_bundle(bundle, op)
        assert report.verdict == 'preserved'
        assert all(entry.invertible and entry.triple_verified for entry in report.curves)
        for f in bundle:
            g = cnot_on_curve(f, op)
            assert g.is_commutative and g.is_invertible


def test_qubit_cnot_pointwise_phi(gf8):
    op = CnotOp(1, 2, 1)
    for lam, phi in QUBIT_CNOT_PHI.items():
        f = slope_curve(gf8, lam)
        g = cnot_qubit_curve_formula(f, op)
        assert g.phi() == phi
        assert g == cnot_on_curve(f, op)


def test_pointwise_formula_matches_all_qubit_cnots(gf8):
    for op in _cnots(3, 2):
        for f in desarguesian_bundle(gf8):
            assert cnot_qubit_curve_formula(f, op) == cnot_on_curve(f, op)


def test_pointwise_formula_needs_qubits(gf9):
    with pytest.raises(NotQubit):
        cnot_qubit_curve_formula(slope_curve(gf9, 1), CnotOp(1, 2, 1))


def test_t_maps():
    assert t_map(S, 2, 5).tolist() == [[2, 0], [0, 3]]
    assert t_map(F, 2, 5).tolist() == [[0, 2], [2, 0]]
    for kind, k in itertools.product((S, F), range(1, 7)):
        assert round(np.linalg.det(t_map(kind, k, 7))) % 7 == 1
    with pytest.raises(TransformError):
        t_map(S, 0, 3)


def test_k_matrix_blocks():
    K = k_matrix([S, F], [2, 1], 3)
    assert K.k11.tolist() == [[2, 0], [0, 0]]
    assert K.k12.tolist() == [[0, 0], [0, 2]]
    assert K.k21.tolist() == [[0, 0], [0, 1]]
    assert K.k22.tolist() == [[2, 0], [0, 0]]
    with pytest.raises(TransformError):
        k_matrix([S, F], [1], 3)


def test_cnot_k_matrix():
    K = cnot_k_matrix(CnotOp(1, 2, 1), 2, 3)
    assert K.k11.tolist() == [[1, 0], [2, 1]]
    assert K.k22.tolist() == [[1, 1], [0, 1]]
    assert not K.k12.any() and not K.k21.any()


def test_mixed_kind_rejected():
    with pytest.raises(MixedKind):
        LocalOp.from_assignment([S, F], [1, 1])
    assert LocalOp.from_assignment([F, F], [1, 2]) == LocalOp(F, (1, 2))


def test_gf9_local_fixed_point(gf9):
    f = slope_curve(gf9, 4)
    op = LocalOp(S, (2, 1))
    K = op.k_matrix(3)
    assert K.K.tolist() == np.diag([2, 1, 2, 1]).tolist()
    A = apply_local_to_generator(generator_matrix(f, [8, 2]), K)
    assert A.A.tolist() == [[2, 0, 2, 0], [0, 1, 0, 2]]
    pc = local_on_curve(f, op)
    assert parametric_to_explicit(pc) == f
    assert apply_triple(nonstandard_ls(pc), local_perms(gf9, op)) == standard_ls(f)


def test_trivial_local_is_identity(gf8):
    f = slope_curve(gf8, 3)
    op = LocalOp(S, (1, 1, 1))
    pc = local_on_curve(f, op)
    assert pc.gamma_alpha.tolist() == gf8.C_inv.tolist()
    assert pc.gamma_beta.tolist() == f.gamma.tolist()
    assert local_perms(gf8, op).is_identity


def test_type_f_on_identity_gf4(gf4):
    f = identity_curve(gf4)
    op = LocalOp(F, (1, 1))
    triple = local_perms(gf4, op)
    assert triple.transpose_first
    assert apply_triple(nonstandard_ls(local_on_curve(f, op)), triple) == standard_ls(f)


@pytest.mark.parametrize('field_args', [(2, 2), (2, 3), (3, 2)])
def test_local_formulas_match_generator_route(field_args):
    basis = create_field(*field_args)
    for kind in (S, F):
        for ks in itertools.product(range(1, basis.p), repeat=basis.n):
            op = LocalOp(kind, ks)
            for f in desarguesian_bundle(basis):
                direct = local_on_curve(f, op)
                routed = apply_local_to_generator(generator_matrix(f), op.k_matrix(basis.p)).to_parametric()
                assert direct.gamma_alpha.tolist() == routed.gamma_alpha.tolist()
                assert direct.gamma_beta.tolist() == routed.gamma_beta.tolist()


@pytest.mark.parametrize('field_args', [(2, 2), (2, 3), (3, 2)])
def test_uniform_local_preserves_bundles(field_args):
    basis = create_field(*field_args)
    bundle = desarguesian_bundle(basis)
    for kind in (S, F):
        for ks in itertools.product(range(1, basis.p), repeat=basis.n):
            report = transform_bundle(bundle, LocalOp(kind, ks))
            assert report.verdict == 'preserved', (kind, ks)


@pytest.mark.parametrize('field_args', [(2, 2), (2, 3), (3, 2)])
def test_mixed_assignments_break_bundles(field_args):
    basis = create_field(*field_args)
    bundle = desarguesian_bundle(basis)
    for kinds in itertools.product((S, F), repeat=basis.n):
        report = mixed_sf_breaks_bundle(bundle, kinds)
        if len(set(kinds)) == 1:
            assert report.verdict == 'preserved'
            assert report.degenerate_count == 0
        else:
            assert report.verdict == 'broken'
            assert report.degenerate_count >= 1


def test_local_wrong_qudit_count(gf9):
    with pytest.raises(IncompatibleOps):
        local_on_curve(slope_curve(gf9, 1), LocalOp(S, (1, 1, 1)))


def _inv(k, p):
    return pow(k, -1, p)


@pytest.mark.parametrize('p', [2, 3, 5, 7])
def test_local_composition_laws(p):
    for k, r in itertools.product(range(1, p), repeat=2):
        assert compose_ops(LocalOp(S, (k,)), LocalOp(S, (r,)), p) == LocalOp(S, ((k * r) % p,))
        assert compose_ops(LocalOp(S, (k,)), LocalOp(F, (r,)), p) == LocalOp(F, ((r * _inv(k, p)) % p,))
        assert compose_ops(LocalOp(F, (r,)), LocalOp(S, (k,)), p) == LocalOp(F, ((r * k) % p,))
        ff = compose_ops(LocalOp(F, (k,)), LocalOp(F, (r,)), p)
        assert ff == LocalOp(S, ((-r * _inv(k, p)) % p,))
        if (k * k - r * r) % p == 0:
            assert ff == LocalOp(S, ((-k * _inv(r, p)) % p,))


@pytest.mark.parametrize('p', [2, 3, 5, 7])
def test_local_composition_matches_t_map_product(p):
    for (ka, k), (kb, r) in itertools.product(itertools.product((S, F), range(1, p)), repeat=2):
        result = compose_ops(LocalOp(ka, (k,)), LocalOp(kb, (r,)), p)
        product = (t_map(ka, k, p) @ t_map(kb, r, p)) % p
        assert t_map(result.kind, result.k[0], p).tolist() == product.tolist()


@pytest.mark.parametrize('p', [3, 5])
def test_local_cnot_commutation(p):
    n = 2
    for kind in (S, F):
        for ks in itertools.product(range(1, p), repeat=n):
            local = LocalOp(kind, ks)
            for cnot in _cnots(n, p):
                normal = compose_ops(local, cnot, p)
                assert isinstance(normal, tuple) and isinstance(normal[0], CnotOp)
                expected = (op_k_matrix(local, n, p) @ op_k_matrix(cnot, n, p)) % p
                assert op_k_matrix(normal, n, p).tolist() == expected.tolist()


def test_s_cnot_relation():
    cnot, local = compose_ops(LocalOp(S, (2, 3)), CnotOp(1, 2, 1), 5)
    # m t r^-1 = 1 * 3 * 3 = 4 (mod 5)
    assert cnot == CnotOp(1, 2, 4)
    assert local == LocalOp(S, (2, 3))


def test_f_cnot_swaps_control_and_target():
    cnot, _ = compose_ops(LocalOp(F, (1, 1)), CnotOp(1, 2, 1), 3)
    assert cnot == CnotOp(2, 1, 2)


def test_cnot_cnot_composition():
    assert compose_ops(CnotOp(1, 2, 2), CnotOp(1, 2, 2), 3) == CnotOp(1, 2, 1)
    assert compose_ops(CnotOp(1, 2, 1), CnotOp(2, 1, 1), 3) == (CnotOp(1, 2, 1), CnotOp(2, 1, 1))
    assert Tuple[CnotOp, CnotOp] in get_args(get_type_hints(compose_ops)['return'])


def test_incompatible_ops():
    with pytest.raises(IncompatibleOps):
        compose_ops(LocalOp(S, (1, 1)), LocalOp(S, (1,)), 3)
    with pytest.raises(IncompatibleOps):
        compose_ops(LocalOp(S, (1, 1)), CnotOp(1, 3, 1), 3)


def test_orbit_gf8(gf8):
    seed = slope_curve(gf8, 1)
    members = orbit(seed)
    assert len(members) == 7
    assert members[0][1].is_identity
    assert members[1][1].cycles()['rows'] == [[1, 7, 6, 5, 4, 3, 2]]
    assert {curve for curve, _ in members} == set(desarguesian_bundle(gf8))
    for (previous, _), (current, triple) in zip(members, members[1:]):
        assert apply_triple(standard_ls(previous), triple) == standard_ls(current)


def test_orbit_gf9(gf9):
    assert len(orbit(slope_curve(gf9, 1))) == 8
    assert len(orbit(slope_curve(gf9, 2))) == 4


def test_orbit_of_identity(gf8):
    assert len(orbit(identity_curve(gf8))) == 1


def test_orbit_of_singular_seed(gf8):
    with pytest.raises(Degenerate):
        orbit(Curve(gf8, np.zeros((3, 3), dtype=np.int64)))


def test_report_json_shape(gf4):
    report = transform_bundle(desarguesian_bundle(gf4), CnotOp(1, 2, 1))
    data = report.to_dict()
    assert data['verdict'] == 'preserved'
    assert data['operation'] == {'cnot': {'p': 1, 'q': 2, 'm': 1}}
    assert len(data['curves']) == 3
    assert set(data['triple']) == {'rows', 'cols', 'symbols', 'transpose_first', 'cycles'}
