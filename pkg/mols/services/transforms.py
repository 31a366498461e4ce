"""
Clifford transformations on curves for the MOLS toolkit.

CNOT and local Type S / Type F operations act on curves through integer
matrices over Z_p: the CNOT matrix X^m_{p,q}, the per-qudit 2 x 2 maps T(U_j)
and the 2n x 2n block matrix K acting on generator matrices. This module
derives the permutation triples relating transformed and original squares,
checks bundle preservation and builds composition orbits.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from mols.services.curves import (
    Curve,
    Degenerate,
    GeneratorMatrix,
    ParametricCurve,
    adjacency_from_map,
    bundle_is_spread,
    compose,
    generator_matrix,
)
from mols.services.gf_engine import SelfDualBasis
from mols.services.latin import (
    PermutationTriple,
    _inverse,
    apply_triple,
    nonstandard_ls,
    standard_ls,
)

logger = logging.getLogger(__name__)


class TransformError(Exception):
    """Custom exception for transformation errors."""
    pass


class MixedKind(TransformError):
    """A local operation mixes Type S and Type F qudits."""
    pass


class IncompatibleOps(TransformError):
    """Operations act on different qudit structures."""
    pass


class NotQubit(TransformError):
    """A qubit-only formula was used with p != 2."""
    pass


class LocalKind(Enum):
    """Local operation families."""
    S = "S"
    F = "F"


@dataclass(frozen=True)
class CnotOp:
    """Data class for X^m_{p,q}: control and target are 1-based qudit indices."""
    control: int
    target: int
    power: int

    def validate(self, n: int) -> None:
        if not (1 <= self.control <= n and 1 <= self.target <= n):
            raise TransformError(f"CNOT qudits ({self.control},{self.target}) outside 1..{n}")
        if self.control == self.target:
            raise TransformError("CNOT control and target must differ")

    def matrix(self, n: int, p: int, sign: int = 1) -> np.ndarray:
        return cnot_matrix(self, n, p, sign)

    def to_dict(self) -> Dict[str, Any]:
        return {"cnot": {"p": self.control, "q": self.target, "m": self.power}}


def cnot_matrix(op: CnotOp, n: int, p: int, sign: int = 1) -> np.ndarray:
    """(X^{sign*m}_{p,q})_ij = delta_ij + sign*m delta_ip delta_jq."""
    op.validate(n)
    x = np.eye(n, dtype=np.int64)
    x[op.control - 1, op.target - 1] = (sign * op.power) % p
    return x


def t_map(kind: LocalKind, k: int, p: int) -> np.ndarray:
    """T(U) for one qudit: diag(k, k^-1) for S, [[0, -k^-1], [k, 0]] for F."""
    k = int(k) % p
    if k == 0:
        raise TransformError("Local parameters must be nonzero mod p")
    k_inv = pow(k, -1, p)
    if kind is LocalKind.S:
        return np.array([[k, 0], [0, k_inv]], dtype=np.int64)
    return np.array([[0, (-k_inv) % p], [k, 0]], dtype=np.int64)


@dataclass(frozen=True)
class KMatrix:
    """Data class for the 2n x 2n block matrix (K11, K12; K21, K22)."""
    K: np.ndarray
    n: int

    @property
    def k11(self) -> np.ndarray:
        return self.K[: self.n, : self.n]

    @property
    def k12(self) -> np.ndarray:
        return self.K[: self.n, self.n:]

    @property
    def k21(self) -> np.ndarray:
        return self.K[self.n:, : self.n]

    @property
    def k22(self) -> np.ndarray:
        return self.K[self.n:, self.n:]


def k_matrix(kinds: Sequence[LocalKind], ks: Sequence[int], p: int) -> KMatrix:
    """Assemble K from per-qudit T-maps; kinds may be mixed."""
    n = len(kinds)
    if len(ks) != n:
        raise TransformError(f"{len(ks)} parameters for {n} qudits")
    K = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for j, (kind, k) in enumerate(zip(kinds, ks)):
        t = t_map(kind, k, p)
        K[j, j], K[j, n + j] = t[0]
        K[n + j, j], K[n + j, n + j] = t[1]
    return KMatrix(K=K, n=n)


def cnot_k_matrix(op: CnotOp, n: int, p: int) -> KMatrix:
    """blockdiag((X^-m)^T, X^m): the CNOT action on generator matrices."""
    K = np.zeros((2 * n, 2 * n), dtype=np.int64)
    K[:n, :n] = op.matrix(n, p, sign=-1).T
    K[n:, n:] = op.matrix(n, p)
    return KMatrix(K=K, n=n)


@dataclass(frozen=True)
class LocalOp:
    """Data class for a uniform local operation, one parameter per qudit."""
    kind: LocalKind
    k: Tuple[int, ...]

    @classmethod
    def from_assignment(cls, kinds: Sequence[LocalKind], ks: Sequence[int]) -> "LocalOp":
        """
        Raises:
            MixedKind: If the per-qudit kinds are not all equal
        """
        if len(set(kinds)) != 1:
            raise MixedKind(f"Local operations must be all S or all F, got {[k.value for k in kinds]}")
        return cls(kind=kinds[0], k=tuple(int(x) for x in ks))

    @property
    def n(self) -> int:
        return len(self.k)

    def k_matrix(self, p: int) -> KMatrix:
        return k_matrix([self.kind] * self.n, self.k, p)

    def to_dict(self) -> Dict[str, Any]:
        return {"local": {"kind": self.kind.value, "k": list(self.k)}}

# compose_ops result: one operation, or an ordered pair of them
Operation = Union[CnotOp, LocalOp]
# Result of compose_ops: one operation, or a pair with the CNOT leftmost
Composed = Union[Operation, Tuple[CnotOp, LocalOp], Tuple[CnotOp, CnotOp]]


@dataclass
class CurveReport:
    """Data class for one curve of a bundle report."""
    input_gamma: List[List[int]]
    output: Dict[str, Any]
    invertible: bool
    triple_verified: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "input_gamma": self.input_gamma,
            "output": self.output,
            "invertible": self.invertible,
            "triple_verified": self.triple_verified,
        }


@dataclass
class BundleReport:
    """Data class for the effect of one operation on a bundle."""
    operation: Dict[str, Any]
    curves: List[CurveReport] = field(default_factory=list)
    verdict: str = "preserved"
    triple: Optional[PermutationTriple] = None

    @property
    def degenerate_count(self) -> int:
        return sum(1 for entry in self.curves if not entry.invertible)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "operation": self.operation,
            "verdict": self.verdict,
            "degenerate_curves": self.degenerate_count,
            "triple": None if self.triple is None else self.triple.to_dict(),
            "curves": [entry.to_dict() for entry in self.curves],
        }


def cnot_on_curve(f: Curve, op: CnotOp) -> Curve:
    """Gamma(g) = (X^m)^T Gamma(f) X^m."""
    x = op.matrix(f.basis.n, f.basis.p)
    return Curve(f.basis, f.field.matmul(x.T, f.gamma, x), name=None)


def cnot_parametric(f: Curve, op: CnotOp) -> ParametricCurve:
    """Gamma_alpha = (X^-m)^T C^-1, Gamma_beta = Gamma(f) X^m."""
    n, p = f.basis.n, f.basis.p
    gamma_alpha = f.field.matmul(op.matrix(n, p, sign=-1).T, f.basis.C_inv)
    gamma_beta = f.field.matmul(f.gamma, op.matrix(n, p))
    return ParametricCurve(f.basis, gamma_alpha, gamma_beta)


def _v_inverse(basis: SelfDualBasis, op: CnotOp) -> np.ndarray:
    """V^-1 = C^-1 X^-m C."""
    return basis.field.matmul(basis.C_inv, op.matrix(basis.n, basis.p, sign=-1), basis.C)


def perms_nonstandard_to_standard(basis: SelfDualBasis, op: CnotOp) -> PermutationTriple:
    """Rows and columns via s -> s (X^-m)^T; symbols fixed."""
    relabel = basis.relabeling(op.matrix(basis.n, basis.p, sign=-1).T)
    return PermutationTriple(relabel, relabel, range(basis.field.order))


def perms_to_original(basis: SelfDualBasis, op: CnotOp) -> PermutationTriple:
    """
    Triple taking the non-standard CNOT square straight back to the original.

    No row permutation; columns via W = (X^-m)^T C^-1 X^-m C; symbol k -> j
    where s^k = s^j V with V = C^-1 X^m C.
    """
    n, p = basis.n, basis.p
    x_inv = op.matrix(n, p, sign=-1)
    w = basis.field.matmul(x_inv.T, basis.C_inv, x_inv, basis.C)
    return PermutationTriple(
        range(basis.field.order), basis.relabeling(w), basis.relabeling(_v_inverse(basis, op))
    )


def perms_standard_to_standard(basis: SelfDualBasis, op: CnotOp) -> PermutationTriple:
    """Rows via s (X^m)^T, columns via s V^-1, symbols via V."""
    v_inv = _v_inverse(basis, op)
    return PermutationTriple(
        basis.relabeling(op.matrix(basis.n, basis.p).T),
        basis.relabeling(v_inv),
        basis.relabeling(v_inv),
    )


def apply_local_to_generator(A: GeneratorMatrix, K: KMatrix) -> GeneratorMatrix:
    """A' = A K = (A_l K11 + A_r K21 | A_l K12 + A_r K22)."""
    if K.n != A.basis.n:
        raise IncompatibleOps(f"K acts on {K.n} qudits, generator matrix on {A.basis.n}")
    return GeneratorMatrix(basis=A.basis, A=A.basis.field.matmul(A.A, K.K))


def local_on_curve(f: Curve, op: LocalOp) -> ParametricCurve:
    """
    Parametric curve after a uniform local operation.

    S: (K11 C^-1, Gamma K11^-1). F: (Gamma K21 C^-1, -K21^-1).
    """
    basis, field_ = f.basis, f.field
    if op.n != basis.n:
        raise IncompatibleOps(f"Local operation on {op.n} qudits, field has {basis.n}")
    K = op.k_matrix(basis.p)
    if op.kind is LocalKind.S:
        gamma_alpha = field_.matmul(K.k11, basis.C_inv)
        gamma_beta = field_.matmul(f.gamma, field_.inv_matrix(K.k11))
    else:
        gamma_alpha = field_.matmul(f.gamma, K.k21, basis.C_inv)
        gamma_beta = field_.mat(-field_.inv_matrix(K.k21))
    return ParametricCurve(basis, gamma_alpha, gamma_beta)


def local_perms(basis: SelfDualBasis, op: LocalOp) -> PermutationTriple:
    """
    Triple taking the locally transformed square back to the original standard one.

    S: columns s -> s K11^2, symbols s -> s K11. F: transpose first, then
    columns s -> -s K21^-2 C^2, symbols s -> s K21^-1 C.
    """
    field_ = basis.field
    K = op.k_matrix(basis.p)
    identity = range(field_.order)
    if op.kind is LocalKind.S:
        return PermutationTriple(
            identity,
            basis.relabeling(field_.matmul(K.k11, K.k11)),
            basis.relabeling(K.k11),
        )
    k21_inv = field_.inv_matrix(K.k21)
    columns = field_.mat(-field_.matmul(k21_inv, k21_inv, basis.C, basis.C))
    return PermutationTriple(
        identity,
        basis.relabeling(columns),
        basis.relabeling(field_.matmul(k21_inv, basis.C)),
        transpose_first=True,
    )


def transform_bundle(bundle: Sequence[Curve], op: Operation) -> BundleReport:
    """
    Apply one operation to every curve and verify the derived common triple.

    Returns:
        BundleReport: Per-curve results, verdict and the common triple
    """
    if not bundle:
        raise TransformError("Cannot transform an empty bundle")
    basis = bundle[0].basis
    report = BundleReport(operation=op.to_dict())
    outputs = []

    if isinstance(op, CnotOp):
        triple = perms_standard_to_standard(basis, op)
        for f in bundle:
            g = cnot_on_curve(f, op)
            outputs.append(g)
            entry = CurveReport(f.gamma.tolist(), {"gamma": g.gamma.tolist()}, g.is_invertible)
            if g.is_invertible and f.is_invertible:
                entry.triple_verified = apply_triple(standard_ls(g), triple) == standard_ls(f)
            report.curves.append(entry)
    else:
        triple = local_perms(basis, op)
        for f in bundle:
            pc = local_on_curve(f, op)
            outputs.append(pc)
            entry = CurveReport(f.gamma.tolist(), pc.to_dict(), pc.is_invertible)
            if pc.is_invertible and f.is_invertible:
                entry.triple_verified = apply_triple(nonstandard_ls(pc), triple) == standard_ls(f)
            report.curves.append(entry)

    report.triple = triple
    if report.degenerate_count or not bundle_is_spread(outputs):
        report.verdict = "broken"
    elif not all(entry.triple_verified for entry in report.curves):
        report.verdict = "preserved-unverified"
    logger.info(f"Transformed {len(bundle)} curves with {op.to_dict()}: {report.verdict}")
    return report


def mixed_sf_breaks_bundle(
    bundle: Sequence[Curve],
    kinds: Sequence[LocalKind],
    ks: Optional[Sequence[int]] = None,
) -> BundleReport:
    """
    Apply a per-qudit S/F assignment to every generator matrix of a bundle.

    Returns:
        BundleReport: Curves whose transformed generator matrix has a
            singular half are flagged as not invertible
    """
    basis = bundle[0].basis
    ks = [1] * len(kinds) if ks is None else list(ks)
    K = k_matrix(kinds, ks, basis.p)
    report = BundleReport(
        operation={"local": {"kinds": [k.value for k in kinds], "k": ks}}
    )
    outputs = []
    for f in bundle:
        transformed = apply_local_to_generator(generator_matrix(f), K)
        outputs.append(transformed.to_parametric())
        report.curves.append(CurveReport(
            f.gamma.tolist(),
            {
                "generator": transformed.A.tolist(),
                "left_invertible": transformed.left_invertible,
                "right_invertible": transformed.right_invertible,
            },
            not transformed.is_degenerate,
        ))
    if report.degenerate_count:
        report.verdict = "broken"
        logger.debug(f"Assignment {[k.value for k in kinds]} degenerates "
                     f"{report.degenerate_count} of {len(bundle)} curves")
    elif not bundle_is_spread(outputs):
        report.verdict = "broken"
    return report


def _classify(t: np.ndarray) -> Tuple[LocalKind, int]:
    if t[0, 1] == 0 and t[1, 0] == 0:
        return LocalKind.S, int(t[0, 0])
    if t[0, 0] == 0 and t[1, 1] == 0:
        return LocalKind.F, int(t[1, 0])
    raise TransformError(f"T-map {t.tolist()} is neither Type S nor Type F")


def compose_ops(a: Operation, b: Operation, p: int) -> Composed:
    """
    Compose the operator product a.b at the T-map / K-matrix level.

    Local products are multiplied qudit by qudit. A local followed in the
    written order by a CNOT is rewritten with the CNOT moved to the left:
    U^S_p(r) U^S_q(t) X^m_{p,q} = X^{m t r^-1}_{p,q} U^S U^S and
    U^F_p(r) U^F_q(t) X^m_{p,q} = X^{-m t r^-1}_{q,p} U^F U^F.

    Raises:
        IncompatibleOps: If the operations act on different qudit counts
    """
    if isinstance(a, LocalOp) and isinstance(b, LocalOp):
        if a.n != b.n:
            raise IncompatibleOps(f"Local operations on {a.n} and {b.n} qudits")
        kinds, ks = [], []
        for ka, kb in zip(a.k, b.k):
            kind, k = _classify((t_map(a.kind, ka, p) @ t_map(b.kind, kb, p)) % p)
            kinds.append(kind)
            ks.append(k)
        return LocalOp.from_assignment(kinds, ks)

    if isinstance(a, CnotOp) and isinstance(b, CnotOp):
        if (a.control, a.target) == (b.control, b.target):
            return CnotOp(a.control, a.target, (a.power + b.power) % p)
        return a, b

    if isinstance(a, CnotOp):
        if max(a.control, a.target) > b.n:
            raise IncompatibleOps(f"CNOT on ({a.control},{a.target}) with {b.n}-qudit local")
        return a, b

    if max(b.control, b.target) > a.n:
        raise IncompatibleOps(f"CNOT on ({b.control},{b.target}) with {a.n}-qudit local")
    r = a.k[b.control - 1] % p
    t = a.k[b.target - 1] % p
    scale = (t * pow(r, -1, p)) % p
    if a.kind is LocalKind.S:
        return CnotOp(b.control, b.target, (b.power * scale) % p), a
    return CnotOp(b.target, b.control, (-b.power * scale) % p), a


def op_k_matrix(op: Union[Operation, Tuple[CnotOp, LocalOp]], n: int, p: int) -> np.ndarray:
    """K-matrix of an operation or of a written-order product of operations."""
    if isinstance(op, tuple):
        result = np.eye(2 * n, dtype=np.int64)
        for part in op:
            result = (result @ op_k_matrix(part, n, p)) % p
        return result
    if isinstance(op, CnotOp):
        return cnot_k_matrix(op, n, p).K
    return op.k_matrix(p).K


def orbit(seed: Curve) -> List[Tuple[Curve, PermutationTriple]]:
    """
    Composition orbit seed, seed o seed, ... until it returns to seed.

    Each entry carries the first-index relabeling taking the previous square
    to the current one, the map s -> s Gamma(seed) C read backwards.

    Raises:
        Degenerate: If the seed is not invertible
    """
    if not seed.is_invertible:
        raise Degenerate(f"Orbit seed {seed.gamma.tolist()} is not invertible")
    basis, field_ = seed.basis, seed.field
    d = field_.order
    step = _inverse(basis.relabeling(field_.matmul(seed.gamma, basis.C)))
    triple = PermutationTriple(step, range(d), range(d))
    members = [(seed, PermutationTriple.identity(d))]
    current = compose(seed, seed)
    while current != seed:
        members.append((current, triple))
        if len(members) > d:
            raise TransformError("Orbit did not close within p^n steps")
        current = compose(current, seed)
    logger.debug(f"Orbit of {seed.name or seed.gamma.tolist()} has length {len(members)}")
    return members


def cnot_qubit_curve_formula(f: Curve, op: CnotOp) -> Curve:
    """
    Pointwise CNOT image of a qubit curve.

    g(a) = f(a) + Tr(a th_q) f(th_p) + Tr[f(a) th_p] th_q + Tr(a th_q) Tr[f(th_p) th_p] th_q

    Raises:
        NotQubit: If p != 2
    """
    basis, field_ = f.basis, f.field
    if basis.p != 2:
        raise NotQubit(f"The pointwise CNOT formula needs p = 2, got {basis.p}")
    op.validate(basis.n)
    if op.power % 2 == 0:
        return Curve(basis, f.gamma, name=f.name)

    theta_p = basis.theta[op.control - 1]
    theta_q = basis.theta[op.target - 1]
    f_theta_p = f.evaluate(theta_p)
    corner = field_.trace(field_.mul(f_theta_p, theta_p))

    def image(x: int) -> int:
        fx = f.evaluate(x)
        on_target = field_.trace(field_.mul(x, theta_q))
        total = fx
        if on_target:
            total = field_.add(total, f_theta_p)
        if field_.trace(field_.mul(fx, theta_p)):
            total = field_.add(total, theta_q)
        if on_target and corner:
            total = field_.add(total, theta_q)
        return total

    return adjacency_from_map(basis, image)
