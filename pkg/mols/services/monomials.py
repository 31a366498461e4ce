"""
Generalized Pauli monomials and mutually unbiased bases.

A point (alpha, beta) of a curve labels the monomial Z^z X^x with
z = s(alpha) and x = coords(beta). Commutativity is decided with the trace
form; the numeric layer builds the d x d matrices, diagonalizes each
commuting class and measures how unbiased the resulting bases are.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from mols.services.curves import AnyCurve, Curve
from mols.services.gf_engine import ElementLike, SelfDualBasis

logger = logging.getLogger(__name__)

SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")

DEFAULT_MUB_TOLERANCE = 1e-9
DEFAULT_ORTHONORMAL_TOLERANCE = 1e-10
DEFAULT_NUMERIC_MAX_ORDER = 32


class MonomialError(Exception):
    """Custom exception for monomial and MUB errors."""
    pass


class NotCommutative(MonomialError):
    """A curve labels monomials that do not pairwise commute."""
    pass


class EigenbasisFailure(MonomialError):
    """A computed basis is not a joint eigenbasis of its commuting class."""
    pass


@dataclass(frozen=True)
class PauliMonomial:
    """Data class for Z^z X^x on n qudits, labelled by its curve point when known."""
    z: Tuple[int, ...]
    x: Tuple[int, ...]
    p: int
    alpha: Optional[int] = None
    beta: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def is_identity(self) -> bool:
        return not any(self.z) and not any(self.x)

    def product(self, other: "PauliMonomial") -> "PauliMonomial":
        """Exponent-wise product, phase dropped."""
        if (self.p, self.n) != (other.p, other.n):
            raise MonomialError("Monomials act on different qudit systems")
        return PauliMonomial(
            z=tuple((a + b) % self.p for a, b in zip(self.z, other.z)),
            x=tuple((a + b) % self.p for a, b in zip(self.x, other.x)),
            p=self.p,
        )

    def text(self) -> str:
        """Tensor-product form such as ZX⊗1 or 1⊗ZX²."""
        factors = []
        for z, x in zip(self.z, self.x):
            factor = _power("Z", z) + _power("X", x)
            factors.append(factor or "1")
        return "⊗".join(factors)

    def to_dict(self) -> Dict[str, Any]:
        data = {"z": list(self.z), "x": list(self.x), "text": self.text()}
        if self.alpha is not None:
            data["point"] = [self.alpha, self.beta]
        return data


def _power(symbol: str, exponent: int) -> str:
    if exponent == 0:
        return ""
    if exponent == 1:
        return symbol
    return symbol + str(exponent).translate(SUPERSCRIPTS)


def monomial_from_point(basis: SelfDualBasis, alpha: ElementLike, beta: ElementLike) -> PauliMonomial:
    """Z exponents s(alpha), X exponents coords(beta)."""
    return PauliMonomial(
        z=tuple(int(v) for v in basis.svector(alpha)),
        x=tuple(int(v) for v in basis.coords(beta)),
        p=basis.p,
        alpha=int(alpha),
        beta=int(beta),
    )


def commutator_phase(u: PauliMonomial, v: PauliMonomial) -> int:
    """k with U_u U_v = omega^k U_v U_u."""
    return (int(np.dot(u.z, v.x)) - int(np.dot(v.z, u.x))) % u.p


def commutes(
    basis: SelfDualBasis,
    u: Tuple[ElementLike, ElementLike],
    v: Tuple[ElementLike, ElementLike],
) -> bool:
    """tr(alpha_u beta_v) == tr(alpha_v beta_u)."""
    field_ = basis.field
    return field_.trace(field_.mul(u[0], v[1])) == field_.trace(field_.mul(v[0], u[1]))


@dataclass
class CommutingSet:
    """Data class for the d - 1 monomials labelled by the nonzero points of one curve."""
    name: str
    monomials: List[PauliMonomial]
    generators: List[PauliMonomial] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "generators": [m.text() for m in self.generators],
            "monomials": [m.to_dict() for m in self.monomials],
        }


def _curve_points(curve: AnyCurve) -> List[Tuple[int, int]]:
    """Points at parameters 1 .. d-1."""
    if isinstance(curve, Curve):
        values = curve.values()
        return [(x, int(values[x])) for x in range(1, curve.field.order)]
    return [curve.point(x) for x in range(1, curve.field.order)]


def _generator_points(curve: AnyCurve) -> List[Tuple[int, int]]:
    basis = curve.basis
    duals = [basis.dual(k) for k in range(basis.n)]
    if isinstance(curve, Curve):
        return [(x, curve.evaluate(x)) for x in duals]
    return [curve.point(x) for x in duals]


def curve_commuting_set(curve: AnyCurve, name: Optional[str] = None) -> CommutingSet:
    """
    Monomials of a curve, checked to commute pairwise.

    Raises:
        NotCommutative: If two generator monomials fail to commute
    """
    basis = curve.basis
    generator_points = _generator_points(curve)
    for u, v in itertools.combinations(generator_points, 2):
        if not commutes(basis, u, v):
            logger.debug(f"Points {u} and {v} label non-commuting monomials")
            raise NotCommutative(f"Curve {curve!r} labels non-commuting monomials at {u}, {v}")
    return CommutingSet(
        name=name or getattr(curve, "name", None) or repr(curve),
        monomials=[monomial_from_point(basis, a, b) for a, b in _curve_points(curve)],
        generators=[monomial_from_point(basis, a, b) for a, b in generator_points],
    )


def axis_commuting_sets(basis: SelfDualBasis) -> Tuple[CommutingSet, CommutingSet]:
    """The Z-only class (alpha, 0) and the X-only class (0, beta)."""
    labels = range(1, basis.field.order)
    duals = [basis.dual(k) for k in range(basis.n)]
    z_class = CommutingSet(
        name="Z",
        monomials=[monomial_from_point(basis, a, 0) for a in labels],
        generators=[monomial_from_point(basis, a, 0) for a in duals],
    )
    x_class = CommutingSet(
        name="X",
        monomials=[monomial_from_point(basis, 0, b) for b in labels],
        generators=[monomial_from_point(basis, 0, b) for b in basis.theta],
    )
    return z_class, x_class


def all_commuting_sets(bundle: Sequence[AnyCurve]) -> List[CommutingSet]:
    """Axis classes followed by one class per bundle member."""
    basis = bundle[0].basis
    z_class, x_class = axis_commuting_sets(basis)
    return [z_class, x_class] + [curve_commuting_set(curve) for curve in bundle]


def bundle_is_mub(bundle: Sequence[AnyCurve]) -> bool:
    """
    True iff the bundle plus the two axes partition the d^2 - 1 nonidentity
    monomials into commuting classes.
    """
    if not bundle:
        return False
    basis = bundle[0].basis
    d = basis.field.order
    try:
        classes = all_commuting_sets(bundle)
    except NotCommutative:
        return False
    seen = set()
    for commuting_set in classes:
        points = {(m.alpha, m.beta) for m in commuting_set.monomials}
        if len(points) != d - 1 or (0, 0) in points or points & seen:
            return False
        seen |= points
    return len(seen) == d * d - 1


def monomial_matrix(m: PauliMonomial) -> np.ndarray:
    """Tensor product of Z^z X^x factors, qudit 1 leftmost."""
    p = m.p
    omega = np.exp(2j * np.pi / p)
    z_gate = np.diag(omega ** np.arange(p))
    x_gate = np.roll(np.eye(p), 1, axis=0)
    factors = [
        np.linalg.matrix_power(z_gate, z) @ np.linalg.matrix_power(x_gate, x)
        for z, x in zip(m.z, m.x)
    ]
    return reduce(np.kron, factors)


def _degen(tol: float, vecs: np.ndarray, ops: Sequence[np.ndarray], i: int = 0) -> np.ndarray:
    """Split a degenerate eigenspace of one operator using the next ones."""
    if len(ops) == i:
        return vecs

    for j in range(1, vecs.shape[1]):
        for k in range(j):
            dot = vecs[:, j].dot(vecs[:, k].conj())
            if np.abs(dot) > tol:
                vecs[:, j] = (vecs[:, j] - dot * vecs[:, k]) / (1 - np.abs(dot) ** 2) ** 0.5

    subspace = vecs.conj().T @ ops[i] @ vecs
    eigvals, eigvecs = la.eigh(subspace)
    vecs_new = vecs @ eigvecs
    for k in range(len(eigvals)):
        vecs_new[:, k] = vecs_new[:, k] / la.norm(vecs_new[:, k])

    k = 0
    while k < len(eigvals):
        ttol = max(tol, tol * abs(eigvals[k]))
        inds, = np.where(abs(eigvals - eigvals[k]) < ttol)
        if len(inds) > 1:
            vecs_new[:, inds] = _degen(tol, vecs_new[:, inds], ops, i + 1)
        k = inds[-1] + 1
    return vecs_new


def joint_eigenbasis(
    commuting_set: CommutingSet,
    rng: np.random.Generator,
    degeneracy_tol: float = 1e-8,
) -> np.ndarray:
    """
    Columns form a joint eigenbasis of the class generators.

    A random Hermitian combination of the generators is diagonalized;
    accidental degeneracies are split with the Hermitian parts of each
    generator in turn.

    Raises:
        EigenbasisFailure: If a column is not an eigenvector of every generator
    """
    matrices = [monomial_matrix(m) for m in commuting_set.generators]
    ops = []
    for u in matrices:
        ops.append(u + u.conj().T)
        ops.append(1j * (u - u.conj().T))
    weights = rng.standard_normal(len(ops))
    hamiltonian = sum(w * op for w, op in zip(weights, ops))

    eigvals, vecs = la.eigh(hamiltonian)
    k = 0
    while k < len(eigvals):
        ttol = max(degeneracy_tol, degeneracy_tol * abs(eigvals[k]))
        inds, = np.where(abs(eigvals - eigvals[k]) < ttol)
        if len(inds) > 1:
            vecs[:, inds] = _degen(degeneracy_tol, vecs[:, inds], ops)
        k = inds[-1] + 1

    for u in matrices:
        images = u @ vecs
        expectations = np.einsum("ij,ij->j", vecs.conj(), images)
        residual = np.max(np.abs(images - vecs * expectations))
        if residual > 1e-8:
            logger.error(f"Class {commuting_set.name}: eigenvector residual {residual:.3e}")
            raise EigenbasisFailure(
                f"Basis for class {commuting_set.name} is not a joint eigenbasis (residual {residual:.3e})"
            )
    return vecs


@dataclass
class MubReport:
    """Data class for a numeric unbiasedness check."""
    d: int
    classes: List[str]
    max_deviation: float
    orthonormal_error: float
    tolerance: float
    orthonormal_tolerance: float
    seed: int

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance and self.orthonormal_error < self.orthonormal_tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "classes": self.classes,
            "max_deviation": self.max_deviation,
            "orthonormal_error": self.orthonormal_error,
            "tolerance": self.tolerance,
            "orthonormal_tolerance": self.orthonormal_tolerance,
            "seed": self.seed,
            "passed": self.passed,
        }


def numeric_unbiasedness(
    bundle: Sequence[AnyCurve],
    tol: float = DEFAULT_MUB_TOLERANCE,
    seed: int = 1729,
    orthonormal_tol: float = DEFAULT_ORTHONORMAL_TOLERANCE,
    max_order: int = DEFAULT_NUMERIC_MAX_ORDER,
) -> MubReport:
    """
    Build the d + 1 eigenbases of a bundle and measure their overlaps.

    Args:
        bundle: d - 1 commutative curves
        tol (float): Bound on max | |<a|b>| - d^-1/2 |
        seed (int): Seed for the random Hermitian combinations
        orthonormal_tol (float): Bound on max |V^dag V - I| per basis
        max_order (int): Largest dimension handled numerically

    Returns:
        MubReport: Deviation and orthonormality figures

    Raises:
        NotCommutative: If a curve labels non-commuting monomials
        EigenbasisFailure: If a class has no computable joint eigenbasis
        MonomialError: If the dimension exceeds max_order
    """
    if not bundle:
        raise MonomialError("Cannot check an empty bundle")
    d = bundle[0].field.order
    if d > max_order:
        raise MonomialError(f"Numeric check limited to d <= {max_order}, got {d}")

    rng = np.random.default_rng(seed)
    classes = all_commuting_sets(bundle)
    bases = [joint_eigenbasis(commuting_set, rng) for commuting_set in classes]

    identity = np.eye(d)
    orthonormal_error = max(float(np.max(np.abs(v.conj().T @ v - identity))) for v in bases)
    target = d ** -0.5
    max_deviation = 0.0
    for a, b in itertools.combinations(bases, 2):
        overlaps = np.abs(a.conj().T @ b)
        max_deviation = max(max_deviation, float(np.max(np.abs(overlaps - target))))

    report = MubReport(
        d=d,
        classes=[c.name for c in classes],
        max_deviation=max_deviation,
        orthonormal_error=orthonormal_error,
        tolerance=tol,
        orthonormal_tolerance=orthonormal_tol,
        seed=seed,
    )
    logger.info(f"Numeric MUB check for d={d}: deviation {max_deviation:.2e}, "
                f"orthonormality {orthonormal_error:.2e}")
    return report
