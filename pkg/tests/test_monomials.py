"""
Tests for Pauli monomials, commuting classes and the MUB checks.
"""

import itertools

import numpy as np
import pytest

from mols.services.curves import curve_from_phi, desarguesian_bundle, slope_curve
from mols.services.gf_engine import create_field
from mols.services.monomials import (
    MonomialError,
    NotCommutative,
    PauliMonomial,
    all_commuting_sets,
    axis_commuting_sets,
    bundle_is_mub,
    commutator_phase,
    commutes,
    curve_commuting_set,
    joint_eigenbasis,
    monomial_from_point,
    monomial_matrix,
    numeric_unbiasedness,
)


def test_generator_texts_gf9(gf9):
    f = slope_curve(gf9, 4)
    texts = [monomial_from_point(gf9, g, f.evaluate(g)).text() for g in (8, 2)]
    assert texts == ['ZX⊗1', '1⊗ZX²']


def test_identity_text():
    identity = PauliMonomial(z=(0, 0), x=(0, 0), p=3)
    assert identity.is_identity
    assert identity.text() == '1⊗1'


def test_monomial_dict(gf9):
    data = monomial_from_point(gf9, 8, 4).to_dict()
    assert data == {'z': [1, 0], 'x': [1, 0], 'text': 'ZX⊗1', 'point': [8, 4]}


@pytest.mark.parametrize('field_args', [(2, 2), (2, 3), (3, 2)])
def test_phase_agrees_with_trace_form(field_args):
    basis = create_field(*field_args)
    d = basis.field.order
    points = list(itertools.product(range(d), repeat=2))
    monomials = {pt: monomial_from_point(basis, *pt) for pt in points}
    for u, v in itertools.product(points, repeat=2):
        phase = commutator_phase(monomials[u], monomials[v])
        assert (phase == 0) == commutes(basis, u, v)


def test_curve_class_closed_under_product(gf9):
    commuting_set = curve_commuting_set(slope_curve(gf9, 5))
    members = {(m.z, m.x) for m in commuting_set.monomials}
    assert len(members) == 8
    members.add(((0, 0), (0, 0)))
    for a, b in itertools.combinations(commuting_set.monomials, 2):
        product = a.product(b)
        assert (product.z, product.x) in members


def test_curve_class_pairwise_commutes(gf8):
    commuting_set = curve_commuting_set(slope_curve(gf8, 3))
    assert len(commuting_set.generators) == 3
    for a, b in itertools.combinations(commuting_set.monomials, 2):
        assert commutator_phase(a, b) == 0


def test_hall_curve_not_commutative(gf9):
    with pytest.raises(NotCommutative):
        curve_commuting_set(curve_from_phi(gf9, (0, 5)))


def test_axis_classes(gf9):
    z_class, x_class = axis_commuting_sets(gf9)
    assert all(not any(m.x) for m in z_class.monomials)
    assert all(not any(m.z) for m in x_class.monomials)
    assert [m.text() for m in z_class.generators] == ['Z⊗1', '1⊗Z']
    assert [m.text() for m in x_class.generators] == ['X⊗1', '1⊗X']


@pytest.mark.parametrize('field_args', [(2, 1), (2, 2), (2, 3), (3, 2), (5, 1)])
def test_desarguesian_bundle_is_mub(field_args):
    bundle = desarguesian_bundle(create_field(*field_args))
    assert bundle_is_mub(bundle)
    assert len(all_commuting_sets(bundle)) == len(bundle) + 2


def test_broken_bundles_are_not_mub(gf9):
    bundle = desarguesian_bundle(gf9)
    assert not bundle_is_mub(bundle + [bundle[0]])
    assert not bundle_is_mub(bundle[:-1])
    assert not bundle_is_mub(bundle[:-1] + [curve_from_phi(gf9, (0, 5))])
    assert not bundle_is_mub([])


@pytest.mark.parametrize('p', [2, 3, 5])
def test_weyl_relation(p):
    omega = np.exp(2j * np.pi / p)
    z = monomial_matrix(PauliMonomial(z=(1,), x=(0,), p=p))
    x = monomial_matrix(PauliMonomial(z=(0,), x=(1,), p=p))
    assert np.allclose(z @ x, omega * x @ z)


def test_matrices_follow_commutator_phase(gf9):
    omega = np.exp(2j * np.pi / 3)
    points = [(1, 2), (4, 0), (0, 7), (5, 5), (8, 3)]
    for u, v in itertools.combinations(points, 2):
        mu, mv = monomial_from_point(gf9, *u), monomial_from_point(gf9, *v)
        a, b = monomial_matrix(mu), monomial_matrix(mv)
        assert np.allclose(a @ b, omega ** commutator_phase(mu, mv) * b @ a)


def test_monomial_matrix_qudit_order():
    m = PauliMonomial(z=(1, 0), x=(0, 0), p=2)
    assert np.allclose(monomial_matrix(m), np.diag([1, 1, -1, -1]))


def test_joint_eigenbasis(gf8):
    commuting_set = curve_commuting_set(slope_curve(gf8, 2))
    vecs = joint_eigenbasis(commuting_set, np.random.default_rng(7))
    assert np.allclose(vecs.conj().T @ vecs, np.eye(8))
    for m in commuting_set.monomials:
        u = monomial_matrix(m)
        images = u @ vecs
        ratios = np.einsum('ij,ij->j', vecs.conj(), images)
        assert np.allclose(images, vecs * ratios)


@pytest.mark.parametrize('field_args', [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2)])
def test_numeric_unbiasedness(field_args):
    report = numeric_unbiasedness(desarguesian_bundle(create_field(*field_args)))
    assert report.passed
    assert report.d == create_field(*field_args).field.order
    assert report.classes[:2] == ['Z', 'X']
    assert report.to_dict()['passed'] is True


def test_numeric_unbiasedness_detects_repeated_class(gf4):
    bundle = desarguesian_bundle(gf4)
    report = numeric_unbiasedness(bundle + [bundle[0]])
    assert not report.passed


def test_numeric_limit(gf9):
    with pytest.raises(MonomialError):
        numeric_unbiasedness(desarguesian_bundle(gf9), max_order=8)


def test_numeric_rejects_non_commutative(gf9):
    bundle = desarguesian_bundle(gf9)[:-1] + [curve_from_phi(gf9, (0, 5))]
    with pytest.raises(NotCommutative):
        numeric_unbiasedness(bundle)
