"""
Latin square service for the MOLS toolkit.

Builds standard and non-standard squares from curves, standardizes them,
checks Latin-ness, orthogonality and completeness, extracts minisquares and
applies row/column/symbol permutation triples.
"""

import io
import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from mols.services.curves import Curve, Degenerate, ParametricCurve
from mols.services.gf_engine import SelfDualBasis

logger = logging.getLogger(__name__)


class LatinSquareError(Exception):
    """Custom exception for Latin square errors."""
    pass


class OrderMismatch(LatinSquareError):
    """Two squares that must share an order do not."""
    pass


class SizeMismatch(LatinSquareError):
    """A permutation does not match the order of the square it is applied to."""
    pass


class NotLatin(LatinSquareError):
    """A grid repeats a symbol in some row or column."""
    pass


def is_latin_grid(grid: np.ndarray) -> bool:
    grid = np.asarray(grid)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        return False
    d = grid.shape[0]
    if grid.min(initial=0) < 0 or grid.max(initial=0) >= d:
        return False
    expected = np.arange(d)
    return bool(
        np.all(np.sort(grid, axis=1) == expected) and np.all(np.sort(grid, axis=0).T == expected)
    )


@dataclass(frozen=True, eq=False)
class LatinSquare:
    """Data class for a d x d Latin square over exponent labels."""
    grid: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=np.int64)
        if not is_latin_grid(grid):
            raise NotLatin(f"Grid of shape {grid.shape} is not a Latin square")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatinSquare):
            return NotImplemented
        return bool(np.array_equal(self.grid, other.grid))

    def __hash__(self) -> int:
        return hash(self.grid.tobytes())

    @property
    def d(self) -> int:
        return self.grid.shape[0]

    def is_standard(self) -> bool:
        return bool(np.array_equal(self.grid[0], np.arange(self.d)))

    def is_reduced(self) -> bool:
        return self.is_standard() and bool(np.array_equal(self.grid[:, 0], np.arange(self.d)))

    def to_text(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.grid.tolist()) + "\n"

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "grid": self.grid.tolist(), "provenance": self.provenance}


def _cycles(perm: Sequence[int]) -> List[List[int]]:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cycle.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append(cycle)
    return cycles


def _inverse(perm: Sequence[int]) -> Tuple[int, ...]:
    inverse = np.empty(len(perm), dtype=np.int64)
    inverse[np.asarray(perm)] = np.arange(len(perm))
    return tuple(int(x) for x in inverse)


@dataclass(frozen=True)
class PermutationTriple:
    """
    Row, column and symbol relabelings, with an optional leading transpose.

    Each component maps an old index to its new index: entry (i, j) holding
    symbol k moves to (rows[i], cols[j]) and becomes symbols[k].
    """
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    symbols: Tuple[int, ...]
    transpose_first: bool = False

    def __post_init__(self):
        for name in ("rows", "cols", "symbols"):
            perm = tuple(int(x) for x in getattr(self, name))
            if sorted(perm) != list(range(len(perm))):
                raise LatinSquareError(f"{name} {list(perm)} is not a permutation")
            object.__setattr__(self, name, perm)
        if not len(self.rows) == len(self.cols) == len(self.symbols):
            raise SizeMismatch("Triple components have different lengths")

    @classmethod
    def identity(cls, d: int) -> "PermutationTriple":
        ident = tuple(range(d))
        return cls(ident, ident, ident)

    @property
    def d(self) -> int:
        return len(self.rows)

    @property
    def is_identity(self) -> bool:
        return self == PermutationTriple.identity(self.d)

    def inverse(self) -> "PermutationTriple":
        if self.transpose_first:
            return PermutationTriple(_inverse(self.cols), _inverse(self.rows),
                                     _inverse(self.symbols), True)
        return PermutationTriple(_inverse(self.rows), _inverse(self.cols), _inverse(self.symbols))

    def cycles(self) -> Dict[str, List[List[int]]]:
        """Cycle notation per component, each cycle starting at its smallest element."""
        return {
            "rows": _cycles(self.rows),
            "cols": _cycles(self.cols),
            "symbols": _cycles(self.symbols),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "symbols": list(self.symbols),
            "transpose_first": self.transpose_first,
            "cycles": self.cycles(),
        }


@dataclass(frozen=True)
class Minisquare:
    """
    Data class for the n x n minisquare l_ij = theta_j + f(c_i^-1 theta_i).

    ``row_labels[i]`` and ``col_labels[j]`` locate l_ij inside the full
    standard square: l_ij = L[row_labels[i]][col_labels[j]].
    """
    basis: SelfDualBasis
    grid: Tuple[Tuple[int, ...], ...]
    row_labels: Tuple[int, ...]
    col_labels: Tuple[int, ...]

    def trace_matrix(self) -> np.ndarray:
        """Tr(l_ij c_j^-1 theta_j), which equals 1 + Gamma_ij."""
        field_ = self.basis.field
        n = self.basis.n
        return np.array(
            [[field_.trace(field_.mul(self.grid[i][j], self.basis.dual(j))) for j in range(n)]
             for i in range(n)],
            dtype=np.int64,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grid": [list(row) for row in self.grid],
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "trace_matrix": self.trace_matrix().tolist(),
        }


@dataclass(frozen=True)
class MolsSet:
    """Data class for a set of Latin squares of one order and the bundle behind it."""
    squares: Tuple[LatinSquare, ...]
    bundle: Optional[Tuple[Curve, ...]] = None

    @property
    def d(self) -> int:
        return self.squares[0].d if self.squares else 0


def standard_grid(curve: Curve) -> np.ndarray:
    """
    Raw grid L_ij = sigma^j + f(sigma^i) for any adjacency matrix.

    Singular curves give the non-Latin diagnostic grids; use
    :func:`standard_ls` for squares.
    """
    basis, field_ = curve.basis, curve.field
    S = basis.svectors
    row_part = field_.matmul(S, curve.gamma, basis.C)
    return basis.labels_from_svectors(S[None, :, :] + row_part[:, None, :])


def standard_ls(curve: Curve) -> LatinSquare:
    """
    Standard-form square (s^j C^-1 + s^i Gamma) theta of an invertible curve.

    Raises:
        Degenerate: If the curve is not invertible
    """
    if not curve.is_invertible:
        logger.error(f"Refusing to build a square from singular curve {curve!r}")
        raise Degenerate(f"Curve {curve.gamma.tolist()} is not invertible")
    return LatinSquare(standard_grid(curve), {"kind": "standard", "curve": curve.to_dict()})


def nonstandard_ls(pc: ParametricCurve) -> LatinSquare:
    """
    Square (s^j Gamma_alpha + s^i Gamma_beta) theta of a parametric curve.

    Raises:
        Degenerate: If either adjacency matrix is singular
    """
    if not pc.is_invertible:
        raise Degenerate(f"Parametric curve {pc!r} is not invertible")
    basis, field_ = pc.basis, pc.field
    S = basis.svectors
    col_part = field_.matmul(S, pc.gamma_alpha, basis.C)
    row_part = field_.matmul(S, pc.gamma_beta, basis.C)
    grid = basis.labels_from_svectors(col_part[None, :, :] + row_part[:, None, :])
    return LatinSquare(grid, {"kind": "nonstandard", "curve": pc.to_dict()})


def standardization_triple(pc: ParametricCurve) -> PermutationTriple:
    """Rows and columns both relabeled by s -> s Gamma_alpha C."""
    basis = pc.basis
    relabel = basis.relabeling(pc.field.matmul(pc.gamma_alpha, basis.C))
    return PermutationTriple(relabel, relabel, range(basis.field.order))


def standardize(ls: LatinSquare, pc: ParametricCurve) -> Tuple[LatinSquare, PermutationTriple]:
    """
    Bring a square built from pc to the standard square of its explicit curve.

    Returns:
        Tuple[LatinSquare, PermutationTriple]: Standard square and the applied triple
    """
    triple = standardization_triple(pc)
    standard = apply_triple(ls, triple)
    logger.debug(f"Standardized square with row/column cycles {triple.cycles()['rows']}")
    return standard, triple


def apply_triple(ls: LatinSquare, t: PermutationTriple) -> LatinSquare:
    """
    Transpose (when flagged), then relabel rows, columns and symbols.

    Raises:
        SizeMismatch: If the triple and square orders differ
    """
    if t.d != ls.d:
        raise SizeMismatch(f"Triple of order {t.d} applied to square of order {ls.d}")
    grid = ls.grid.T if t.transpose_first else ls.grid
    out = np.empty_like(grid)
    out[np.ix_(np.asarray(t.rows), np.asarray(t.cols))] = np.asarray(t.symbols)[grid]
    return LatinSquare(out, {"kind": "permuted", "source": ls.provenance.get("kind")})


def pair_occupancy(a: LatinSquare, b: LatinSquare) -> np.ndarray:
    """d x d table counting how often each ordered symbol pair occurs."""
    if a.d != b.d:
        raise OrderMismatch(f"Orders differ: {a.d} and {b.d}")
    pairs = (a.grid * a.d + b.grid).ravel()
    return np.bincount(pairs, minlength=a.d * a.d).reshape(a.d, a.d)


def write_occupancy_csv(a: LatinSquare, b: LatinSquare, stream: TextIO) -> None:
    np.savetxt(stream, pair_occupancy(a, b), fmt="%d", delimiter=",")


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    """
    True iff all d^2 ordered symbol pairs are distinct.

    Raises:
        OrderMismatch: If the orders differ
    """
    return bool(np.all(pair_occupancy(a, b) == 1))


def is_mols(ms: MolsSet) -> bool:
    return all(are_orthogonal(a, b) for a, b in itertools.combinations(ms.squares, 2))


def is_complete_mols(ms: MolsSet) -> bool:
    """True iff the set has d - 1 pairwise orthogonal squares."""
    if not ms.squares or len(ms.squares) != ms.d - 1:
        return False
    return is_mols(ms)


def create_mols(bundle: Sequence[Curve]) -> MolsSet:
    """Factory function to build the standard squares of a bundle."""
    squares = tuple(standard_ls(curve) for curve in bundle)
    logger.info(f"Built {len(squares)} squares of order {squares[0].d if squares else 0}")
    return MolsSet(squares=squares, bundle=tuple(bundle))


def minisquare(curve: Curve) -> Minisquare:
    """Minisquare l_ij = theta_j + f(c_i^-1 theta_i) of a curve."""
    basis, field_ = curve.basis, curve.field
    duals = tuple(basis.dual(i) for i in range(basis.n))
    images = [curve.evaluate(x) for x in duals]
    grid = tuple(
        tuple(field_.add(theta_j, images[i]) for theta_j in basis.theta) for i in range(basis.n)
    )
    return Minisquare(basis=basis, grid=grid, row_labels=duals, col_labels=basis.theta)


def minisquare_commutative(ms: Minisquare) -> bool:
    """Tr(l_ij c_j^-1 theta_j) = Tr(l_ji c_i^-1 theta_i) for all i, j."""
    traces = ms.trace_matrix()
    return bool(np.array_equal(traces, traces.T))


def square_from_text(text: str) -> LatinSquare:
    grid = np.loadtxt(io.StringIO(text), dtype=np.int64, ndmin=2)
    return LatinSquare(grid, {"kind": "file"})


def load_square(path: str) -> LatinSquare:
    """
    Read a square from a JSON ({"grid": ...}) or whitespace text file.

    Raises:
        LatinSquareError: If the file cannot be parsed as a Latin square
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            content = handle.read()
        if path.endswith(".json"):
            data = json.loads(content)
            return LatinSquare(data["grid"], data.get("provenance", {"kind": "file"}))
        return square_from_text(content)
    except LatinSquareError:
        raise
    except (OSError, ValueError, KeyError, TypeError) as e:
        logger.error(f"Failed to read square from {path}: {str(e)}")
        raise LatinSquareError(f"Cannot read square from {path}: {str(e)}")
