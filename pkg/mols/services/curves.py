"""
Additive curve calculus for the MOLS toolkit.

Curves beta = f(alpha) are encoded by their n x n adjacency matrix over Z_p,
Gamma_kl = tr(c_l^{-1} theta_l f(c_k^{-1} theta_k)). Evaluation, composition,
inversion, parametric conversion and generator matrices all reduce to integer
matrix products with the diagonal matrix C of the basis.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from mols.services.gf_engine import ElementLike, SelfDualBasis, basis_from_dict

logger = logging.getLogger(__name__)


class CurveError(Exception):
    """Custom exception for curve construction and calculus errors."""
    pass


class Degenerate(CurveError):
    """A matrix that must be invertible is singular over Z_p."""
    pass


class NotAdditive(CurveError):
    """A supplied map is not additive on the field."""
    pass


class GeneratorsDegenerate(CurveError):
    """Supplied generators do not span the field over Z_p."""
    pass


def slope_name(field, lam: int) -> str:
    if lam == 0:
        return "0"
    if lam == field.one:
        return "α"
    return f"σ^{lam}α"


class Curve:
    """
    Explicit additive curve f stored as its adjacency matrix.

    The linearized-polynomial coefficients are kept when the curve was built
    from them and can always be recomputed with :meth:`phi`.
    """

    def __init__(
        self,
        basis: SelfDualBasis,
        gamma: Any,
        phi: Optional[Sequence[int]] = None,
        name: Optional[str] = None,
    ):
        self.basis = basis
        self.gamma = basis.field.mat(gamma)
        if self.gamma.shape != (basis.n, basis.n):
            raise CurveError(
                f"Adjacency matrix must be {basis.n}x{basis.n}, got {self.gamma.shape}"
            )
        self.gamma.setflags(write=False)
        self._phi = None if phi is None else tuple(int(x) for x in phi)
        self.name = name

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"Curve{label}(gamma={self.gamma.tolist()})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Curve):
            return NotImplemented
        return self.basis.to_dict() == other.basis.to_dict() and np.array_equal(
            self.gamma, other.gamma
        )

    def __hash__(self) -> int:
        return hash((self.basis.p, self.basis.n, self.gamma.tobytes()))

    @property
    def field(self):
        return self.basis.field

    @property
    def is_invertible(self) -> bool:
        return self.field.det(self.gamma) != 0

    @property
    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.gamma, self.gamma.T))

    def evaluate(self, x: ElementLike) -> int:
        """f(sigma^i) = s^i Gamma theta."""
        s = self.basis.svector(x)
        return self.basis.element_from_coords(self.field.matmul(s, self.gamma))

    def values(self) -> np.ndarray:
        """f evaluated on every label, as a label array."""
        coords = self.field.matmul(self.basis.svectors, self.gamma)
        return self.basis.labels_from_svectors(self.field.matmul(coords, self.basis.C))

    def phi(self) -> Tuple[int, ...]:
        """Coefficients phi_i of f(alpha) = sum_i phi_i alpha^(p^i)."""
        if self._phi is not None:
            return self._phi
        field = self.field
        images = [self.evaluate(self.basis.dual(k)) for k in range(self.basis.n)]
        coefficients = []
        for i in range(self.basis.n):
            total = 0
            for theta_k, image in zip(self.basis.theta, images):
                total = field.add(total, field.mul(field.frobenius(theta_k, i), image))
            coefficients.append(total)
        return tuple(coefficients)

    def to_dict(self) -> Dict[str, Any]:
        data = {"gamma": self.gamma.tolist(), "phi": list(self.phi())}
        if self.name:
            data["name"] = self.name
        return data


class ParametricCurve:
    """Parametric curve (alpha(sigma^i), beta(sigma^i)) given by two adjacency matrices."""

    def __init__(self, basis: SelfDualBasis, gamma_alpha: Any, gamma_beta: Any,
                 name: Optional[str] = None):
        self.basis = basis
        self.gamma_alpha = basis.field.mat(gamma_alpha)
        self.gamma_beta = basis.field.mat(gamma_beta)
        for m in (self.gamma_alpha, self.gamma_beta):
            if m.shape != (basis.n, basis.n):
                raise CurveError(f"Adjacency matrices must be {basis.n}x{basis.n}")
            m.setflags(write=False)
        self.name = name

    def __repr__(self) -> str:
        return (f"ParametricCurve(gamma_alpha={self.gamma_alpha.tolist()}, "
                f"gamma_beta={self.gamma_beta.tolist()})")

    @property
    def field(self):
        return self.basis.field

    @property
    def is_invertible(self) -> bool:
        det = self.field.det
        return det(self.gamma_alpha) != 0 and det(self.gamma_beta) != 0

    def point(self, x: ElementLike) -> Tuple[int, int]:
        s = self.basis.svector(x)
        alpha = self.basis.element_from_coords(self.field.matmul(s, self.gamma_alpha))
        beta = self.basis.element_from_coords(self.field.matmul(s, self.gamma_beta))
        return alpha, beta

    def points(self) -> set:
        field, basis = self.field, self.basis
        alphas = basis.labels_from_svectors(
            field.matmul(basis.svectors, self.gamma_alpha, basis.C))
        betas = basis.labels_from_svectors(
            field.matmul(basis.svectors, self.gamma_beta, basis.C))
        return set(zip(alphas.tolist(), betas.tolist()))

    def to_dict(self) -> Dict[str, Any]:
        data = {"gamma_alpha": self.gamma_alpha.tolist(), "gamma_beta": self.gamma_beta.tolist()}
        if self.name:
            data["name"] = self.name
        return data


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Data class for an n x 2n generator matrix (Z exponents | X exponents)."""
    basis: SelfDualBasis
    A: np.ndarray

    @property
    def left(self) -> np.ndarray:
        return self.A[:, : self.basis.n]

    @property
    def right(self) -> np.ndarray:
        return self.A[:, self.basis.n:]

    @property
    def left_invertible(self) -> bool:
        return self.basis.field.det(self.left) != 0

    @property
    def right_invertible(self) -> bool:
        return self.basis.field.det(self.right) != 0

    @property
    def is_degenerate(self) -> bool:
        return not (self.left_invertible and self.right_invertible)

    def to_parametric(self, name: Optional[str] = None) -> ParametricCurve:
        """Read A = (Gamma_alpha C | Gamma_beta) back as a parametric curve."""
        return ParametricCurve(
            self.basis, self.basis.field.matmul(self.left, self.basis.C_inv), self.right, name=name
        )


AnyCurve = Union[Curve, ParametricCurve]


def curve_eval(curve: Curve, x: ElementLike) -> int:
    return curve.evaluate(x)


def _gamma_of(basis: SelfDualBasis, fn: Callable[[int], ElementLike]) -> np.ndarray:
    return np.array([basis.coords(int(fn(basis.dual(k)))) for k in range(basis.n)],
                    dtype=np.int64)


def adjacency_from_map(
    basis: SelfDualBasis,
    fn: Callable[[int], ElementLike],
    name: Optional[str] = None,
) -> Curve:
    """
    Build the curve of an additive map given pointwise.

    Args:
        basis (SelfDualBasis): Field basis
        fn (Callable): Map from label to label
        name (str, optional): Display name

    Returns:
        Curve: Curve whose evaluation reproduces fn on every element

    Raises:
        NotAdditive: If fn is not additive
    """
    curve = Curve(basis, _gamma_of(basis, fn), name=name)
    expected = np.array([int(fn(x)) for x in range(basis.field.order)], dtype=np.int64)
    if not np.array_equal(expected, curve.values()):
        mismatch = int(np.nonzero(expected != curve.values())[0][0])
        logger.error(f"Map {name or fn!r} is not additive (first mismatch at label {mismatch})")
        raise NotAdditive(f"Map is not additive: disagrees with its linear part at label {mismatch}")
    return curve


def curve_from_phi(basis: SelfDualBasis, phi: Sequence[int], name: Optional[str] = None) -> Curve:
    """Curve of the linearized polynomial sum_i phi_i alpha^(p^i)."""
    field = basis.field
    phi = tuple(int(x) for x in phi)
    if len(phi) != basis.n:
        raise CurveError(f"Expected {basis.n} linearized coefficients, got {len(phi)}")

    def evaluate(x: int) -> int:
        total = 0
        for i, coefficient in enumerate(phi):
            total = field.add(total, field.mul(coefficient, field.frobenius(x, i)))
        return total

    curve = adjacency_from_map(basis, evaluate, name=name)
    return Curve(basis, curve.gamma, phi=phi, name=name)


def phi_is_symmetric(field, phi: Sequence[int]) -> bool:
    """phi_k = phi_{n-k}^(p^k) for k = 1..n-1."""
    n = field.n
    return all(
        int(phi[k]) == field.frobenius(int(phi[(n - k) % n]), k) for k in range(1, n)
    )


def identity_curve(basis: SelfDualBasis) -> Curve:
    return Curve(basis, basis.C_inv, name="α")


def slope_curve(basis: SelfDualBasis, lam: int) -> Curve:
    """The Desarguesian member f(alpha) = sigma^lam alpha."""
    field = basis.field
    return Curve(basis, _gamma_of(basis, lambda x: field.mul(lam, x)),
                 name=slope_name(field, lam))


def compose(f: Curve, g: Curve) -> Curve:
    """f o g, with Gamma(f o g) = Gamma(g) C Gamma(f)."""
    if f.basis is not g.basis and f.basis.to_dict() != g.basis.to_dict():
        raise CurveError("Cannot compose curves over different bases")
    name = f"{f.name}∘{g.name}" if f.name and g.name else None
    return Curve(f.basis, f.field.matmul(g.gamma, f.basis.C, f.gamma), name=name)


def invert_curve(f: Curve) -> Curve:
    """
    Inverse curve, Gamma(f^-1) = C^-1 Gamma^-1 C^-1.

    Raises:
        Degenerate: If Gamma is singular
    """
    if not f.is_invertible:
        logger.error(f"Cannot invert singular curve {f!r}")
        raise Degenerate(f"Adjacency matrix {f.gamma.tolist()} is singular")
    C_inv = f.basis.C_inv
    name = f"({f.name})⁻¹" if f.name else None
    return Curve(f.basis, f.field.matmul(C_inv, f.field.inv_matrix(f.gamma), C_inv), name=name)


def parametric_to_explicit(pc: ParametricCurve) -> Curve:
    """
    Explicit form Gamma(f) = (Gamma_alpha C)^-1 Gamma_beta.

    Raises:
        Degenerate: If Gamma_alpha is singular
    """
    field = pc.field
    alpha_c = field.matmul(pc.gamma_alpha, pc.basis.C)
    if field.det(alpha_c) == 0:
        raise Degenerate(f"Gamma_alpha {pc.gamma_alpha.tolist()} is singular")
    return Curve(pc.basis, field.matmul(field.inv_matrix(alpha_c), pc.gamma_beta), name=pc.name)


def standard_parametrization(f: Curve) -> ParametricCurve:
    """(C^-1, Gamma(f)), the parametric form whose square is the standard one."""
    return ParametricCurve(f.basis, f.basis.C_inv, f.gamma, name=f.name)


def desarguesian_bundle(basis: SelfDualBasis) -> List[Curve]:
    """The p^n - 1 curves f(alpha) = lambda alpha, lambda = sigma^1 .. sigma^(p^n - 1)."""
    bundle = [slope_curve(basis, lam) for lam in range(1, basis.field.order)]
    logger.debug(f"Desarguesian bundle of {len(bundle)} curves over GF({basis.p}^{basis.n})")
    return bundle


def bundle_is_spread(bundle: Sequence[AnyCurve]) -> bool:
    """True when every pair of curves meets only at the origin."""
    point_sets = []
    for curve in bundle:
        if isinstance(curve, Curve):
            values = curve.values()
            points = set(zip(range(len(values)), values.tolist()))
        else:
            points = curve.points()
        points.discard((0, 0))
        point_sets.append(points)
    for a, b in itertools.combinations(range(len(point_sets)), 2):
        if point_sets[a] & point_sets[b]:
            logger.debug(f"Curves {a} and {b} intersect away from the origin")
            return False
    return True


def commutative_curves(basis: SelfDualBasis) -> Iterator[Curve]:
    """Every invertible symmetric adjacency matrix, in lexicographic order of its upper triangle."""
    n, p = basis.n, basis.p
    upper = list(zip(*np.triu_indices(n)))
    for entries in itertools.product(range(p), repeat=len(upper)):
        gamma = np.zeros((n, n), dtype=np.int64)
        for (i, j), value in zip(upper, entries):
            gamma[i, j] = gamma[j, i] = value
        curve = Curve(basis, gamma)
        if curve.is_invertible:
            yield curve


def invertible_curves(basis: SelfDualBasis) -> Iterator[Curve]:
    """Every invertible adjacency matrix, symmetric or not."""
    n, p = basis.n, basis.p
    for entries in itertools.product(range(p), repeat=n * n):
        curve = Curve(basis, np.array(entries, dtype=np.int64).reshape(n, n))
        if curve.is_invertible:
            yield curve


def generator_matrix(
    curve: AnyCurve,
    generators: Optional[Sequence[ElementLike]] = None,
) -> GeneratorMatrix:
    """
    Generator matrix of a curve: row i holds (s(alpha(g_i)) | coords(beta(g_i))).

    Args:
        curve: Explicit or parametric curve
        generators: Parameters g_i spanning the field; c_i^-1 theta_i by default

    Returns:
        GeneratorMatrix: The n x 2n matrix

    Raises:
        GeneratorsDegenerate: If the generators do not span the field
    """
    basis = curve.basis
    field = basis.field
    if generators is None:
        generators = [basis.dual(k) for k in range(basis.n)]
    generators = [int(g) for g in generators]
    if len(generators) != basis.n or field.det([basis.svector(g) for g in generators]) == 0:
        raise GeneratorsDegenerate(f"Generators {generators} do not span GF({field.p}^{field.n})")

    rows = []
    for g in generators:
        if isinstance(curve, Curve):
            alpha, beta = g, curve.evaluate(g)
        else:
            alpha, beta = curve.point(g)
        rows.append(np.concatenate([basis.svector(alpha), basis.coords(beta)]))
    return GeneratorMatrix(basis=basis, A=np.array(rows, dtype=np.int64))


def curve_from_dict(data: Dict[str, Any], basis: Optional[SelfDualBasis] = None) -> AnyCurve:
    """
    Rebuild a curve from JSON.

    Accepts {"gamma"}, {"phi"} or {"gamma_alpha", "gamma_beta"}, with an
    optional "field" description when no basis is supplied.
    """
    if basis is None:
        if "field" not in data:
            raise CurveError("Curve description has no 'field' and no field was given")
        basis = basis_from_dict(data["field"])
    name = data.get("name")
    try:
        if "gamma_alpha" in data:
            return ParametricCurve(basis, data["gamma_alpha"], data["gamma_beta"], name=name)
        if "gamma" in data:
            curve = Curve(basis, data["gamma"], name=name)
            if data.get("phi") is not None and tuple(data["phi"]) != curve.phi():
                raise CurveError(f"phi {data['phi']} does not match gamma {data['gamma']}")
            return curve
        if "phi" in data:
            return curve_from_phi(basis, data["phi"], name=name)
    except (KeyError, TypeError, ValueError) as e:
        logger.error(f"Malformed curve description: {str(e)}")
        raise CurveError(f"Malformed curve description: {str(e)}")
    raise CurveError("Curve description needs 'gamma', 'phi' or 'gamma_alpha'/'gamma_beta'")


def bundle_to_dict(bundle: Sequence[AnyCurve]) -> Dict[str, Any]:
    basis = bundle[0].basis
    return {"field": basis.to_dict(), "curves": [curve.to_dict() for curve in bundle]}


def bundle_from_dict(data: Dict[str, Any]) -> List[AnyCurve]:
    """
    Rebuild a bundle from {"field": ..., "curves": [...]}.

    Raises:
        CurveError: If the description is malformed
    """
    if "field" not in data or not data.get("curves"):
        raise CurveError("Bundle description needs 'field' and a non-empty 'curves' list")
    basis = basis_from_dict(data["field"])
    return [curve_from_dict(entry, basis) for entry in data["curves"]]
