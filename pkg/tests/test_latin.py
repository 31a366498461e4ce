"""
Tests for Latin squares, triples, orthogonality and minisquares.
"""

import io
import itertools
import json

import numpy as np
import pytest

from mols.services.curves import (
    Curve,
    Degenerate,
    ParametricCurve,
    commutative_curves,
    curve_from_phi,
    desarguesian_bundle,
    identity_curve,
    invertible_curves,
    parametric_to_explicit,
    slope_curve,
    standard_parametrization,
)
from mols.services.gf_engine import create_field
from mols.services.latin import (
    LatinSquare,
    LatinSquareError,
    MolsSet,
    NotLatin,
    OrderMismatch,
    PermutationTriple,
    SizeMismatch,
    apply_triple,
    are_orthogonal,
    create_mols,
    is_complete_mols,
    is_latin_grid,
    is_mols,
    load_square,
    minisquare,
    minisquare_commutative,
    nonstandard_ls,
    pair_occupancy,
    square_from_text,
    standard_grid,
    standard_ls,
    standardization_triple,
    standardize,
    write_occupancy_csv,
)
from mols.services.transforms import (
    CnotOp,
    perms_nonstandard_to_standard,
    perms_standard_to_standard,
    perms_to_original,
)

GF4_SLOPE1 = [[0, 1, 2, 3], [2, 3, 0, 1], [3, 2, 1, 0], [1, 0, 3, 2]]

GF8_IDENTITY = [
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 0, 6, 4, 3, 7, 2, 5],
    [2, 6, 0, 7, 5, 4, 1, 3],
    [3, 4, 7, 0, 1, 6, 5, 2],
    [4, 3, 5, 1, 0, 2, 7, 6],
    [5, 7, 4, 6, 2, 0, 3, 1],
    [6, 2, 1, 5, 7, 3, 0, 4],
    [7, 5, 3, 2, 6, 1, 4, 0],
]

HALL_SQUARE = [
    [0, 1, 2, 3, 4, 5, 6, 7, 8],
    [8, 7, 3, 5, 0, 2, 1, 6, 4],
    [3, 4, 1, 7, 2, 6, 8, 0, 5],
    [6, 3, 0, 8, 7, 4, 2, 5, 1],
    [1, 5, 8, 4, 6, 0, 3, 2, 7],
    [4, 6, 5, 2, 8, 3, 7, 1, 0],
    [7, 2, 4, 0, 1, 8, 5, 3, 6],
    [2, 8, 6, 1, 5, 7, 0, 4, 3],
    [5, 0, 7, 6, 3, 1, 4, 8, 2],
]

GF9_PARAMETRIC_SQUARE = [
    [0, 3, 4, 5, 6, 7, 8, 1, 2],
    [6, 8, 7, 4, 2, 5, 1, 3, 0],
    [7, 0, 1, 8, 5, 3, 6, 2, 4],
    [8, 5, 0, 2, 1, 6, 4, 7, 3],
    [1, 4, 6, 0, 3, 2, 7, 5, 8],
    [2, 1, 5, 7, 0, 4, 3, 8, 6],
    [3, 7, 2, 6, 8, 0, 5, 4, 1],
    [4, 2, 8, 3, 7, 1, 0, 6, 5],
    [5, 6, 3, 1, 4, 8, 2, 0, 7],
]


def test_gf4_slope_square(gf4):
    square = standard_ls(slope_curve(gf4, 1))
    assert square.grid.tolist() == GF4_SLOPE1
    assert square.is_standard()


def test_gf8_identity_square(gf8):
    square = standard_ls(identity_curve(gf8))
    assert square.grid.tolist() == GF8_IDENTITY
    assert square.is_reduced()


def test_hall_square(gf9):
    hall = curve_from_phi(gf9, (0, 5))
    assert standard_ls(hall).grid.tolist() == HALL_SQUARE


def test_standard_square_rows_are_translates(gf9):
    f = slope_curve(gf9, 5)
    square = standard_ls(f)
    field = gf9.field
    for i in range(9):
        for j in range(9):
            assert square.grid[i, j] == field.add(j, f.evaluate(i))


def test_singular_curve_rejected(gf8):
    singular = Curve(gf8, [[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    with pytest.raises(Degenerate):
        standard_ls(singular)
    grid = standard_grid(singular)
    assert grid.shape == (8, 8)
    assert not is_latin_grid(grid)


def test_not_latin():
    with pytest.raises(NotLatin):
        LatinSquare([[0, 1], [0, 1]])
    with pytest.raises(NotLatin):
        LatinSquare([[0, 1, 2], [1, 2, 0]])


def test_gf9_nonstandard_square_and_standardization(gf9):
    pc = ParametricCurve(gf9, [[0, 1], [1, 0]], [[1, 1], [1, 2]])
    square = nonstandard_ls(pc)
    assert square.grid.tolist() == GF9_PARAMETRIC_SQUARE
    assert not square.is_standard()
    standard, triple = standardize(square, pc)
    assert standard == standard_ls(slope_curve(gf9, 3))
    assert triple.cycles()['rows'] == [[1, 3, 5, 7], [2, 4, 6, 8]]
    assert triple.cycles()['cols'] == [[1, 3, 5, 7], [2, 4, 6, 8]]
    assert triple.cycles()['symbols'] == []


def test_standardize_standard_parametrization_is_identity(gf8):
    f = slope_curve(gf8, 3)
    pc = standard_parametrization(f)
    standard, triple = standardize(nonstandard_ls(pc), pc)
    assert triple.is_identity
    assert standard == standard_ls(f)


@pytest.mark.parametrize('field_args', [(2, 3), (3, 2)])
def test_standardize_every_desarguesian_parametrization(field_args):
    basis = create_field(*field_args)
    field = basis.field
    for a, b in itertools.product(range(1, field.order), repeat=2):
        pc = ParametricCurve(basis, slope_curve(basis, a).gamma, slope_curve(basis, b).gamma)
        explicit = parametric_to_explicit(pc)
        assert explicit == slope_curve(basis, field.mul(b, field.inverse(a)))
        standard, triple = standardize(nonstandard_ls(pc), pc)
        assert standard == standard_ls(explicit)
        assert triple.symbols == tuple(range(field.order))


def test_nonstandard_degenerate(gf9):
    with pytest.raises(Degenerate):
        nonstandard_ls(ParametricCurve(gf9, [[1, 1], [1, 1]], [[1, 0], [0, 1]]))


def test_triple_identity_and_inverse():
    triple = PermutationTriple((1, 2, 0), (0, 2, 1), (2, 0, 1))
    square = LatinSquare([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert apply_triple(apply_triple(square, triple), triple.inverse()) == square
    assert apply_triple(square, PermutationTriple.identity(3)) == square


def test_transposed_triple_inverse():
    triple = PermutationTriple((1, 2, 0), (0, 2, 1), (2, 0, 1), transpose_first=True)
    square = LatinSquare([[0, 1, 2], [2, 0, 1], [1, 2, 0]])
    assert apply_triple(apply_triple(square, triple), triple.inverse()) == square


def test_triple_moves_entries():
    square = LatinSquare([[0, 1], [1, 0]])
    swapped = apply_triple(square, PermutationTriple((1, 0), (0, 1), (0, 1)))
    assert swapped.grid.tolist() == [[1, 0], [0, 1]]


def test_triple_cycles_start_at_smallest():
    triple = PermutationTriple((0, 6, 1, 3, 4, 5, 2, 7), range(8), range(8))
    assert triple.cycles()['rows'] == [[1, 6, 2]]


def test_triple_rejects_non_permutation():
    with pytest.raises(LatinSquareError):
        PermutationTriple((0, 0), (0, 1), (0, 1))


def test_triple_size_mismatch():
    with pytest.raises(SizeMismatch):
        apply_triple(LatinSquare([[0, 1], [1, 0]]), PermutationTriple.identity(3))


@pytest.mark.parametrize('p, n', [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3)])
def test_desarguesian_bundle_gives_complete_mols(p, n):
    ms = create_mols(desarguesian_bundle(create_field(p, n)))
    assert len(ms.squares) == p ** n - 1
    assert is_complete_mols(ms)


@pytest.mark.parametrize('transpose_first', [False, True])
def test_common_triple_keeps_bundle_complete(gf8, transpose_first):
    rng = np.random.default_rng(1729)
    triple = PermutationTriple(rng.permutation(8), rng.permutation(8), rng.permutation(8), transpose_first)
    ms = create_mols(desarguesian_bundle(gf8))
    moved = MolsSet(squares=tuple(apply_triple(square, triple) for square in ms.squares))
    assert is_complete_mols(moved)


def _derived_triples(gf8):
    op = CnotOp(1, 2, 1)
    yield perms_nonstandard_to_standard(gf8, op)
    yield perms_to_original(gf8, op)
    yield perms_standard_to_standard(gf8, op)
    for lam in range(1, 8):
        yield standardization_triple(ParametricCurve(gf8, slope_curve(gf8, lam).gamma, identity_curve(gf8).gamma))


def test_row_and_column_relabelings_commute(gf8):
    square = standard_ls(slope_curve(gf8, 3))
    ident = tuple(range(8))
    for triple in _derived_triples(gf8):
        rows_only = PermutationTriple(triple.rows, ident, ident)
        cols_only = PermutationTriple(ident, triple.cols, ident)
        symbols_only = PermutationTriple(ident, ident, triple.symbols)
        row_first = apply_triple(apply_triple(square, rows_only), cols_only)
        col_first = apply_triple(apply_triple(square, cols_only), rows_only)
        assert row_first == col_first
        assert apply_triple(row_first, symbols_only) == apply_triple(square, triple)


def test_gf9_bundle_pairwise_orthogonal(gf9):
    bundle = desarguesian_bundle(gf9)
    squares = [standard_ls(f) for f in bundle]
    assert all(are_orthogonal(a, b) for a, b in itertools.combinations(squares, 2))


def test_duplicate_square_not_orthogonal(gf8):
    square = standard_ls(slope_curve(gf8, 2))
    assert not are_orthogonal(square, square)
    assert not is_mols(MolsSet(squares=(square, square)))


def test_incomplete_set(gf8):
    ms = create_mols(desarguesian_bundle(gf8)[:3])
    assert is_mols(ms)
    assert not is_complete_mols(ms)


def test_order_mismatch(gf4, gf8):
    with pytest.raises(OrderMismatch):
        are_orthogonal(standard_ls(slope_curve(gf4, 1)), standard_ls(slope_curve(gf8, 1)))


def test_pair_occupancy(gf4):
    a = standard_ls(slope_curve(gf4, 1))
    b = standard_ls(slope_curve(gf4, 2))
    assert np.all(pair_occupancy(a, b) == 1)
    assert pair_occupancy(a, a).trace() == 16


def test_occupancy_csv(gf4):
    a = standard_ls(slope_curve(gf4, 1))
    stream = io.StringIO()
    write_occupancy_csv(a, a, stream)
    lines = stream.getvalue().strip().splitlines()
    assert lines[0] == '4,0,0,0'
    assert len(lines) == 4


def test_identity_minisquare(gf8):
    ms = minisquare(identity_curve(gf8))
    assert [list(row) for row in ms.grid] == [[0, 6, 3], [6, 0, 5], [3, 5, 0]]
    assert ms.trace_matrix().tolist() == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert minisquare_commutative(ms)


def test_hall_minisquare(gf9):
    hall = curve_from_phi(gf9, (0, 5))
    ms = minisquare(hall)
    assert [list(row) for row in ms.grid] == [[3, 7], [2, 1]]
    assert ms.row_labels == (8, 2)
    assert ms.col_labels == (4, 2)
    assert not minisquare_commutative(ms)
    square = standard_ls(hall)
    for i, row_label in enumerate(ms.row_labels):
        for j, col_label in enumerate(ms.col_labels):
            assert square.grid[row_label, col_label] == ms.grid[i][j]


@pytest.mark.parametrize('field_args', [(2, 2), (2, 3), (3, 2)])
def test_trace_matrix_is_one_plus_gamma(field_args):
    basis = create_field(*field_args)
    for curve in itertools.islice(invertible_curves(basis), 60):
        expected = (1 + curve.gamma) % basis.p
        assert minisquare(curve).trace_matrix().tolist() == expected.tolist()


@pytest.mark.parametrize('field_args', [(2, 2), (2, 3), (3, 2)])
def test_minisquare_detects_commutativity_exhaustively(field_args):
    basis = create_field(*field_args)
    for curve in invertible_curves(basis):
        assert minisquare_commutative(minisquare(curve)) == curve.is_commutative


def test_symmetric_curves_all_pass_minisquare(gf9):
    assert all(minisquare_commutative(minisquare(c)) for c in commutative_curves(gf9))


def test_square_text_round_trip(gf4):
    square = standard_ls(slope_curve(gf4, 1))
    assert square_from_text(square.to_text()) == square


def test_load_square_files(tmp_path, gf4):
    square = standard_ls(slope_curve(gf4, 2))
    text_path = tmp_path / 'square.txt'
    text_path.write_text(square.to_text())
    json_path = tmp_path / 'square.json'
    json_path.write_text(json.dumps(square.to_dict()))
    assert load_square(str(text_path)) == square
    assert load_square(str(json_path)) == square


def test_load_square_errors(tmp_path):
    with pytest.raises(LatinSquareError):
        load_square(str(tmp_path / 'missing.txt'))
    bad = tmp_path / 'bad.txt'
    bad.write_text('0 1\n0 1\n')
    with pytest.raises(NotLatin):
        load_square(str(bad))
