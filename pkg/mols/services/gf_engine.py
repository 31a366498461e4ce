"""
Finite field engine for the MOLS toolkit.

This service builds GF(p^n) with exponent labels and provides the trace,
(almost) self-dual basis and s-vector machinery that every other service
works with. Label 0 is the zero element, label i >= 1 denotes sigma^i, and
label p^n - 1 is the multiplicative identity.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import galois
import numpy as np

logger = logging.getLogger(__name__)

# Constant term first.
BUILTIN_POLYNOMIALS = {
    (2, 3): (1, 0, 1, 1),
    (3, 2): (2, 1, 1),
}

BUILTIN_BASES = {
    (2, 3): (1, 2, 4),
    (3, 2): (4, 2),
}

DEFAULT_MAX_ORDER = 1024


class FieldError(Exception):
    """Custom exception for finite field construction errors."""
    pass


class NotPrime(FieldError):
    """The characteristic is not a prime number."""
    pass


class NotIrreducible(FieldError):
    """The defining polynomial factors over Z_p."""
    pass


class NotPrimitive(FieldError):
    """The polynomial is irreducible but its root does not generate the field."""
    pass


class BasisNotFound(FieldError):
    """No basis with the required trace-orthogonality exists or was supplied."""
    pass


@dataclass(frozen=True)
class FieldSpec:
    """Data class for the parameters that define a field."""
    p: int
    n: int
    poly: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"p": self.p, "n": self.n, "poly": list(self.poly)}


@dataclass(frozen=True)
class FieldElement:
    """
    Rich view of a field element.

    Services pass integer labels around; this view pairs a label with its
    polynomial coordinates and can be used wherever a label is expected.
    """
    label: int
    coeffs: Tuple[int, ...]

    def __int__(self) -> int:
        return self.label

    def __index__(self) -> int:
        return self.label

    def __str__(self) -> str:
        if self.label == 0:
            return "0"
        return f"σ^{self.label}"


ElementLike = Union[int, FieldElement]


def default_polynomial(p: int, n: int) -> Tuple[int, ...]:
    """
    Return the defining polynomial used when none is supplied.

    Args:
        p (int): Characteristic
        n (int): Extension degree

    Returns:
        Tuple[int, ...]: Monic coefficients, constant term first
    """
    if (p, n) in BUILTIN_POLYNOMIALS:
        return BUILTIN_POLYNOMIALS[(p, n)]
    poly = galois.primitive_poly(p, n, method="min")
    coeffs = tuple(int(c) for c in poly.coefficients())
    return tuple(reversed(coeffs))


class Field:
    """
    GF(p^n) with exponent labels.

    Addition goes through a precomputed label table, multiplication is label
    arithmetic modulo p^n - 1. Instances are immutable after construction.
    """

    def __init__(self, spec: FieldSpec):
        """
        Build the label tables for a validated field specification.

        Args:
            spec (FieldSpec): Characteristic, degree and defining polynomial

        Raises:
            NotPrimitive: If sigma does not have order p^n - 1
        """
        self.spec = spec
        self.p = spec.p
        self.n = spec.n
        self.order = spec.p ** spec.n
        self.prime_field = galois.GF(spec.p)

        if spec.n == 1:
            galois_field = self.prime_field
            sigma = galois_field((-spec.poly[0]) % spec.p)
        else:
            irreducible = galois.Poly(list(reversed(spec.poly)), field=self.prime_field)
            galois_field = galois.GF(spec.p ** spec.n, irreducible_poly=irreducible)
            # The integer representation of the polynomial x is p.
            sigma = galois_field(spec.p)

        d = self.order
        int_of_label = np.zeros(d, dtype=np.int64)
        current = galois_field(1)
        for label in range(1, d):
            current = current * sigma
            int_of_label[label] = int(current)
            if int_of_label[label] == 1 and label != d - 1:
                logger.error(f"sigma has order {label} in GF({self.p}^{self.n})")
                raise NotPrimitive(
                    f"Polynomial {list(spec.poly)} is not primitive: sigma has order {label}"
                )
        if int_of_label[d - 1] != 1:
            raise NotPrimitive(f"Polynomial {list(spec.poly)} is not primitive")

        label_of_int = np.zeros(d, dtype=np.int64)
        label_of_int[int_of_label] = np.arange(d)

        elements = galois_field(int_of_label)
        sums = (elements[:, None] + elements[None, :]).view(np.ndarray).astype(np.int64)

        trace = elements.copy()
        conjugate = elements.copy()
        for _ in range(1, self.n):
            conjugate = conjugate ** self.p
            trace = trace + conjugate
        trace_ints = trace.view(np.ndarray).astype(np.int64)
        if np.any(trace_ints >= self.p):
            raise FieldError("Trace left the prime subfield")

        self._int_of_label = int_of_label
        self._label_of_int = label_of_int
        self._powers = self.p ** np.arange(self.n, dtype=np.int64)
        self.add_table = label_of_int[sums]
        self.trace_table = trace_ints
        for table in (self._int_of_label, self._label_of_int, self.add_table, self.trace_table):
            table.setflags(write=False)

        logger.info(f"Built GF({self.p}^{self.n}) with polynomial {list(spec.poly)}")

    def __repr__(self) -> str:
        return f"Field(p={self.p}, n={self.n}, poly={list(self.spec.poly)})"

    @property
    def one(self) -> int:
        return self.order - 1

    def labels(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def element(self, label: ElementLike) -> FieldElement:
        label = self._check(label)
        return FieldElement(label=label, coeffs=tuple(int(c) for c in self.coeffs(label)))

    def coeffs(self, label: ElementLike) -> np.ndarray:
        """Polynomial coordinates of an element, constant term first."""
        value = self._int_of_label[self._check(label)]
        return (value // self._powers) % self.p

    def label_of(self, coeffs: Sequence[int]) -> int:
        """Label of the element with the given polynomial coordinates."""
        digits = np.asarray(coeffs, dtype=np.int64) % self.p
        if digits.shape != (self.n,):
            raise FieldError(f"Expected {self.n} coordinates, got {len(digits)}")
        return int(self._label_of_int[int(digits @ self._powers)])

    def scalar(self, k: int) -> int:
        """Label of the prime-subfield element k."""
        return self.label_of([k] + [0] * (self.n - 1))

    def add(self, a: ElementLike, b: ElementLike) -> int:
        return int(self.add_table[self._check(a), self._check(b)])

    def mul(self, a: ElementLike, b: ElementLike) -> int:
        a, b = self._check(a), self._check(b)
        if a == 0 or b == 0:
            return 0
        return (a + b - 1) % (self.order - 1) + 1

    def mul_labels(self, a: np.ndarray, b: Union[np.ndarray, int]) -> np.ndarray:
        """Vectorised label multiplication."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        product = (a + b - 1) % (self.order - 1) + 1
        return np.where((a == 0) | (b == 0), 0, product)

    def inverse(self, a: ElementLike) -> int:
        a = self._check(a)
        if a == 0:
            raise ZeroDivisionError("The zero element has no inverse")
        return (self.order - 2 - a) % (self.order - 1) + 1

    def power(self, a: ElementLike, k: int) -> int:
        a = self._check(a)
        if k == 0:
            return self.one
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("The zero element has no inverse")
            return 0
        return (a * k - 1) % (self.order - 1) + 1

    def frobenius(self, a: ElementLike, i: int) -> int:
        """a^(p^i)."""
        return self.power(a, self.p ** (i % self.n))

    def trace(self, a: ElementLike) -> int:
        return int(self.trace_table[self._check(a)])

    # Matrix algebra over Z_p.

    def mat(self, m: Any) -> np.ndarray:
        return np.asarray(m, dtype=np.int64) % self.p

    def matmul(self, *ms: Any) -> np.ndarray:
        result = self.mat(ms[0])
        for m in ms[1:]:
            result = (result @ self.mat(m)) % self.p
        return result

    def det(self, m: Any) -> int:
        return int(np.linalg.det(self.prime_field(self.mat(m))))

    def inv_matrix(self, m: Any) -> np.ndarray:
        """
        Inverse of a square matrix over Z_p.

        Raises:
            np.linalg.LinAlgError: If the matrix is singular
        """
        if self.det(m) == 0:
            raise np.linalg.LinAlgError("Matrix is singular over Z_p")
        inverse = np.linalg.inv(self.prime_field(self.mat(m)))
        return inverse.view(np.ndarray).astype(np.int64)

    def _check(self, label: ElementLike) -> int:
        label = int(label)
        if not 0 <= label < self.order:
            raise FieldError(f"Label {label} is outside GF({self.p}^{self.n})")
        return label


class SelfDualBasis:
    """
    (Almost) self-dual basis theta with tr(theta_i theta_j) = c_j delta_ij.

    Carries the s-vector table s^i_k = tr(sigma^i theta_k) and its inverse,
    so curve and square constructions reduce to integer matrix arithmetic.
    """

    def __init__(self, field: Field, theta: Sequence[int]):
        """
        Args:
            field (Field): The field the basis lives in
            theta (Sequence[int]): Basis elements as exponent labels

        Raises:
            BasisNotFound: If theta violates the trace-orthogonality invariants
        """
        self.field = field
        self.theta = tuple(int(t) for t in theta)
        n, p = field.n, field.p
        if len(self.theta) != n:
            raise BasisNotFound(f"A basis of GF({p}^{n}) needs {n} elements")

        gram = np.array(
            [[field.trace(field.mul(a, b)) for b in self.theta] for a in self.theta],
            dtype=np.int64,
        )
        c = np.diag(gram).copy()
        if np.any(gram - np.diag(c)) or np.any(c == 0) or np.any(c[1:] != 1):
            logger.error(f"Rejected basis {self.theta}: Gram matrix {gram.tolist()}")
            raise BasisNotFound(f"{list(self.theta)} is not an (almost) self-dual basis")

        self.c = tuple(int(x) for x in c)
        self.C = np.diag(c)
        self.C_inv = np.diag([pow(int(x), -1, p) for x in c]).astype(np.int64)

        labels = field.labels()
        svectors = np.stack(
            [field.trace_table[field.mul_labels(labels, t)] for t in self.theta], axis=1
        )
        index = svectors @ field._powers
        label_of_index = np.full(field.order, -1, dtype=np.int64)
        label_of_index[index] = labels
        if np.any(label_of_index < 0):
            raise BasisNotFound(f"{list(self.theta)} does not span GF({p}^{n})")

        self._svectors = svectors
        self._label_of_index = label_of_index
        self._svectors.setflags(write=False)
        self._label_of_index.setflags(write=False)

    def __repr__(self) -> str:
        return f"SelfDualBasis(theta={list(self.theta)}, c={list(self.c)})"

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def svectors(self) -> np.ndarray:
        """d x n table whose row i is the s-vector of label i."""
        return self._svectors

    def svector(self, a: ElementLike) -> np.ndarray:
        return self._svectors[self.field._check(a)].copy()

    def element_from_svector(self, s: Sequence[int]) -> int:
        s = np.asarray(s, dtype=np.int64) % self.p
        return int(self._label_of_index[int(s @ self.field._powers)])

    def labels_from_svectors(self, s: np.ndarray) -> np.ndarray:
        """Vectorised inverse of svector over the last axis."""
        s = np.asarray(s, dtype=np.int64) % self.p
        return self._label_of_index[s @ self.field._powers]

    def coords(self, a: ElementLike) -> np.ndarray:
        """Coordinates v with a = sum_k v_k theta_k."""
        return (self.svector(a) @ self.C_inv) % self.p

    def element_from_coords(self, v: Sequence[int]) -> int:
        return self.element_from_svector((np.asarray(v, dtype=np.int64) @ self.C) % self.p)

    def dual(self, k: int) -> int:
        """Label of c_k^{-1} theta_k (0-indexed k)."""
        return self.field.mul(self.field.scalar(int(self.C_inv[k, k])), self.theta[k])

    def relabeling(self, m: np.ndarray) -> np.ndarray:
        """Permutation of labels induced by s -> s m."""
        return self.labels_from_svectors(self.field.matmul(self._svectors, m))

    def to_dict(self) -> Dict[str, Any]:
        data = self.field.spec.to_dict()
        data.update({"theta": list(self.theta), "c": list(self.c)})
        return data


def build_field(
    p: int,
    n: int,
    poly: Optional[Sequence[int]] = None,
    max_order: int = DEFAULT_MAX_ORDER,
) -> Field:
    """
    Build GF(p^n) with the exponent-label convention.

    Args:
        p (int): Characteristic, must be prime
        n (int): Extension degree, at least 1
        poly (Sequence[int], optional): Monic degree-n coefficients, constant
            term first. A built-in or first primitive polynomial when omitted.
        max_order (int): Largest field order accepted

    Returns:
        Field: The constructed field

    Raises:
        NotPrime: If p is not prime
        NotIrreducible: If poly factors over Z_p
        NotPrimitive: If poly is irreducible but its root is not a generator
        FieldError: For malformed parameters
    """
    p, n = int(p), int(n)
    if p < 2 or not galois.is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if n < 1:
        raise FieldError(f"Extension degree must be at least 1, got {n}")
    if p ** n > max_order:
        raise FieldError(f"GF({p}^{n}) exceeds the maximum order {max_order}")

    if poly is None:
        coeffs = default_polynomial(p, n)
    else:
        coeffs = tuple(int(c) % p for c in poly)
        if len(coeffs) != n + 1 or coeffs[-1] != 1:
            raise FieldError(f"Polynomial {list(poly)} is not monic of degree {n}")

    if n > 1:
        galois_poly = galois.Poly(list(reversed(coeffs)), field=galois.GF(p))
        if not galois_poly.is_irreducible():
            logger.error(f"Polynomial {list(coeffs)} is reducible over Z_{p}")
            raise NotIrreducible(f"Polynomial {list(coeffs)} is reducible over Z_{p}")
        if not galois_poly.is_primitive():
            logger.error(f"Polynomial {list(coeffs)} is not primitive over Z_{p}")
            raise NotPrimitive(f"Polynomial {list(coeffs)} is irreducible but not primitive")

    return _cached_field(FieldSpec(p=p, n=n, poly=coeffs))


@lru_cache(maxsize=None)
def _cached_field(spec: FieldSpec) -> Field:
    return Field(spec)


def _search_basis(field: Field) -> Tuple[int, ...]:
    """Lexicographically smallest theta with c_j = 1 for j > 1."""
    n = field.n
    candidates = range(1, field.order)

    def extend(chosen: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
        if len(chosen) == n:
            return chosen
        for t in candidates:
            if t in chosen:
                continue
            norm = field.trace(field.mul(t, t))
            if norm == 0 or (chosen and norm != 1):
                continue
            if any(field.trace(field.mul(t, u)) for u in chosen):
                continue
            found = extend(chosen + (t,))
            if found is not None:
                return found
        return None

    found = extend(())
    if found is None:
        raise BasisNotFound(f"No (almost) self-dual basis found for GF({field.p}^{field.n})")
    return found


def find_basis(field: Field) -> SelfDualBasis:
    """
    Find the (almost) self-dual basis for a field.

    The built-in bases are used for the built-in polynomials; otherwise a
    deterministic search returns the smallest exponent tuple.

    Args:
        field (Field): Field to search

    Returns:
        SelfDualBasis: Basis with its s-vector tables

    Raises:
        BasisNotFound: If the search is exhausted
    """
    key = (field.p, field.n)
    if key in BUILTIN_BASES and field.spec.poly == BUILTIN_POLYNOMIALS[key]:
        theta = BUILTIN_BASES[key]
    else:
        logger.debug(f"Searching basis for GF({field.p}^{field.n})")
        theta = _search_basis(field)
    basis = SelfDualBasis(field, theta)
    logger.info(f"Basis for GF({field.p}^{field.n}): theta={list(basis.theta)}, c={list(basis.c)}")
    return basis


@lru_cache(maxsize=None)
def _cached_basis(field: Field) -> SelfDualBasis:
    return find_basis(field)


def create_field(
    p: int,
    n: int,
    poly: Optional[Iterable[int]] = None,
    max_order: int = DEFAULT_MAX_ORDER,
) -> SelfDualBasis:
    """
    Factory function to create a field together with its basis.

    Returns:
        SelfDualBasis: Basis whose ``field`` attribute is the built field
    """
    field = build_field(p, n, None if poly is None else tuple(poly), max_order=max_order)
    return _cached_basis(field)


def basis_from_dict(data: Dict[str, Any], max_order: int = DEFAULT_MAX_ORDER) -> SelfDualBasis:
    """
    Rebuild a basis from its JSON form.

    Args:
        data (dict): {"p", "n", optional "poly", optional "theta"}

    Returns:
        SelfDualBasis: The described basis

    Raises:
        FieldError: If the description is malformed or inconsistent
    """
    try:
        p, n = int(data["p"]), int(data["n"])
    except (KeyError, TypeError, ValueError) as e:
        raise FieldError(f"Field description needs integer 'p' and 'n': {str(e)}")
    field = build_field(p, n, data.get("poly"), max_order=max_order)
    if data.get("theta") is None:
        return _cached_basis(field)
    basis = SelfDualBasis(field, data["theta"])
    if "c" in data and tuple(int(x) for x in data["c"]) != basis.c:
        raise BasisNotFound(f"Declared c={data['c']} does not match traces {list(basis.c)}")
    return basis
