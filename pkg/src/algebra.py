"""
Finite-dimensional unital associative algebras given by structure constants.

Basis elements are matrix units e_ij labelled ``(i, j)`` (1-based) and ordered
row-major lexicographically; every coefficient table, solver column and JSON
report depends on that ordering.  The structure table is sparse:
``structure[(k, l)]`` lists the ``(m, c_klm)`` with c_klm != 0, so that
b_k * b_l = sum_m c_klm b_m.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from config import settings
from src.errors import AlgebraError
from src.scalar import RawScalar, Scalar, ScalarDomain

logger = logging.getLogger(__name__)

Label = Tuple[int, int]
SparseVector = Dict[int, RawScalar]

_ALGEBRA_SPEC = re.compile(r"^(tn|mn):(\d+)$")
_LABEL_KEY = re.compile(r"^\((\d+),(\d+)\)$")


@dataclass(frozen=True)
class BasisIndex:
    label: Label
    ordinal: int

    @property
    def is_diagonal(self) -> bool:
        return self.label[0] == self.label[1]

    def __str__(self) -> str:
        return f"e{self.label[0]}{self.label[1]}"


class Algebra:
    """A unital associative algebra over an exact scalar domain."""

    def __init__(self, name: str, domain: ScalarDomain, labels: Sequence[Label],
                 structure: Mapping[Tuple[int, int], Sequence[Tuple[int, RawScalar]]],
                 unit: Sequence[RawScalar]):
        if not labels:
            raise AlgebraError("an algebra needs at least one basis element")
        self.name = name
        self.domain = domain
        self.basis: Tuple[BasisIndex, ...] = tuple(
            BasisIndex(tuple(label), k) for k, label in enumerate(labels)
        )
        self.dim = len(self.basis)
        self.index: Dict[Label, int] = {b.label: b.ordinal for b in self.basis}
        if len(self.index) != self.dim:
            raise AlgebraError("basis labels must be distinct")
        self.structure: Dict[Tuple[int, int], Tuple[Tuple[int, RawScalar], ...]] = {
            key: tuple((m, domain.canonical(c)) for m, c in terms if c != 0)
            for key, terms in structure.items()
        }
        if len(unit) != self.dim:
            raise AlgebraError("unit vector length does not match the basis")
        self.unit = tuple(domain.canonical(u) for u in unit)

        self._audit_unit_law()
        self._audit_associativity()

    # -- identity -----------------------------------------------------------

    @property
    def key(self) -> Tuple[str, str]:
        return (self.name, self.domain.spec)

    def __eq__(self, other) -> bool:
        return isinstance(other, Algebra) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Algebra({self.name}, {self.domain.spec}, dim={self.dim})"

    # -- structure table ----------------------------------------------------

    def product_terms(self, k: int, l: int) -> Tuple[Tuple[int, RawScalar], ...]:
        """Nonzero terms (m, c_klm) of b_k * b_l"""
        return self.structure.get((k, l), ())

    @property
    def diagonal(self) -> Tuple[BasisIndex, ...]:
        return tuple(b for b in self.basis if b.is_diagonal)

    def _sparse_product(self, x: SparseVector, y: SparseVector) -> SparseVector:
        dom = self.domain
        out: SparseVector = {}
        for k, xk in x.items():
            for l, yl in y.items():
                for m, c in self.product_terms(k, l):
                    out[m] = dom.add(out.get(m, dom.zero()), dom.mul(dom.mul(xk, yl), c))
        return {m: v for m, v in out.items() if v != 0}

    def _audit_unit_law(self) -> None:
        unit = {k: u for k, u in enumerate(self.unit) if u != 0}
        for k in range(self.dim):
            bk = {k: self.domain.one()}
            if self._sparse_product(unit, bk) != bk or self._sparse_product(bk, unit) != bk:
                raise AlgebraError(f"unit law fails at {self.basis[k]} in {self.name}")

    def _audit_associativity(self) -> None:
        """Exhaustive below the configured dimension, sampled above it"""
        one = self.domain.one()
        if self.dim <= settings.ASSOCIATIVITY_EXHAUSTIVE_MAX_DIM:
            triples: Iterable[Tuple[int, int, int]] = (
                (i, j, k)
                for i in range(self.dim) for j in range(self.dim) for k in range(self.dim)
            )
        else:
            rng = np.random.default_rng(0)
            picks = rng.integers(0, self.dim, size=(settings.ASSOCIATIVITY_SAMPLES, 3))
            triples = (tuple(int(v) for v in row) for row in picks)
            logger.debug("Sampling associativity of %s on %d triples",
                         self.name, settings.ASSOCIATIVITY_SAMPLES)

        for i, j, k in triples:
            bi, bj, bk = {i: one}, {j: one}, {k: one}
            left = self._sparse_product(self._sparse_product(bi, bj), bk)
            right = self._sparse_product(bi, self._sparse_product(bj, bk))
            if left != right:
                raise AlgebraError(
                    f"associativity fails for ({self.basis[i]}, {self.basis[j]}, {self.basis[k]})"
                )

    # -- elements -----------------------------------------------------------

    def element(self, coeffs: Mapping[Label, object] | Sequence[object] = ()) -> "Element":
        """Build an element from a {label: value} map or a full coefficient list"""
        dom = self.domain
        if isinstance(coeffs, Mapping):
            values = [dom.zero()] * self.dim
            for label, value in coeffs.items():
                values[self.ordinal_of(label)] = dom.canonical(
                    value.value if isinstance(value, Scalar) else value
                )
            return Element(self, tuple(values))
        if len(coeffs) != self.dim:
            raise AlgebraError(f"expected {self.dim} coefficients, got {len(coeffs)}")
        return Element(self, tuple(
            dom.canonical(v.value if isinstance(v, Scalar) else v) for v in coeffs
        ))

    def ordinal_of(self, label: Label) -> int:
        try:
            return self.index[tuple(label)]
        except KeyError:
            raise AlgebraError(f"{label} is not a basis label of {self.name}")

    def basis_element(self, which: Label | int) -> "Element":
        k = which if isinstance(which, int) else self.ordinal_of(which)
        values = [self.domain.zero()] * self.dim
        values[k] = self.domain.one()
        return Element(self, tuple(values))

    def zero_element(self) -> "Element":
        return Element(self, (self.domain.zero(),) * self.dim)

    def unit_element(self) -> "Element":
        return Element(self, self.unit)

    def random_element(self, rng) -> "Element":
        return Element(self, tuple(self.domain.random_value(rng) for _ in range(self.dim)))

    def element_from_json(self, data: Mapping[str, str]) -> "Element":
        coeffs = {}
        for key, text in data.items():
            match = _LABEL_KEY.match(key.replace(" ", ""))
            if not match:
                raise AlgebraError(f"bad basis key {key!r}")
            coeffs[(int(match.group(1)), int(match.group(2)))] = self.domain.parse_value(text)
        return self.element(coeffs)


@dataclass(frozen=True)
class Element:
    """An element of an Algebra as a dense coefficient vector."""

    algebra: Algebra
    coeffs: Tuple[RawScalar, ...]

    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element) or other.algebra != self.algebra:
            raise AlgebraError("elements belong to different algebras")

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        add = self.algebra.domain.add
        return Element(self.algebra, tuple(add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        sub = self.algebra.domain.sub
        return Element(self.algebra, tuple(sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Element":
        neg = self.algebra.domain.neg
        return Element(self.algebra, tuple(neg(a) for a in self.coeffs))

    def scale(self, alpha) -> "Element":
        dom = self.algebra.domain
        alpha = dom.canonical(alpha.value if isinstance(alpha, Scalar) else alpha)
        return Element(self.algebra, tuple(dom.mul(alpha, a) for a in self.coeffs))

    def __rmul__(self, alpha) -> "Element":
        return self.scale(alpha)

    def __mul__(self, other: "Element") -> "Element":
        return multiply(self, other)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def coefficient(self, label: Label) -> Scalar:
        return Scalar(self.algebra.domain, self.coeffs[self.algebra.ordinal_of(label)])

    def support(self) -> List[Tuple[BasisIndex, RawScalar]]:
        return [(self.algebra.basis[k], c) for k, c in enumerate(self.coeffs) if c != 0]

    def to_json(self) -> Dict[str, str]:
        """{"(i,j)": "scalar"} over the nonzero coefficients, in basis order"""
        fmt = self.algebra.domain.format
        return {f"({b.label[0]},{b.label[1]})": fmt(c) for b, c in self.support()}

    def __str__(self) -> str:
        terms = [f"{self.algebra.domain.format(c)}*{b}" for b, c in self.support()]
        return " + ".join(terms) if terms else "0"


def multiply(x: Element, y: Element) -> Element:
    """Bilinear extension of the structure table"""
    x._same(y)
    alg = x.algebra
    dom = alg.domain
    out = [dom.zero()] * alg.dim
    for k, xk in enumerate(x.coeffs):
        if xk == 0:
            continue
        for l, yl in enumerate(y.coeffs):
            if yl == 0:
                continue
            w = dom.mul(xk, yl)
            for m, c in alg.product_terms(k, l):
                out[m] = dom.add(out[m], dom.mul(w, c))
    return Element(alg, tuple(out))


def jordan_product(x: Element, y: Element) -> Element:
    """x o y = xy + yx"""
    return multiply(x, y) + multiply(y, x)


def _matrix_unit_algebra(name: str, n: int, domain: ScalarDomain, upper: bool) -> Algebra:
    if n < 1:
        raise AlgebraError(f"matrix size must be at least 1, got {n}")
    labels = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if not upper or i <= j]
    index = {label: k for k, label in enumerate(labels)}
    one = domain.one()

    # e_ij * e_kl = delta_jk e_il
    structure = {}
    for (i, j), k1 in index.items():
        for (k, l), k2 in index.items():
            if j == k:
                structure[(k1, k2)] = ((index[(i, l)], one),)

    unit = [one if i == j else domain.zero() for i, j in labels]
    algebra = Algebra(name, domain, labels, structure, unit)
    logger.debug("Built %s over %s (dim %d)", name, domain.spec, algebra.dim)
    return algebra


def build_tn(n: int, domain: ScalarDomain) -> Algebra:
    """Upper-triangular n x n matrices on the matrix-unit basis"""
    return _matrix_unit_algebra(f"tn:{n}", n, domain, upper=True)


def build_mn(n: int, domain: ScalarDomain) -> Algebra:
    """Full n x n matrices on the matrix-unit basis"""
    return _matrix_unit_algebra(f"mn:{n}", n, domain, upper=False)


def parse_algebra(spec: str, domain: ScalarDomain) -> Algebra:
    """Build the algebra named by "tn:<n>" or "mn:<n>" """
    match = _ALGEBRA_SPEC.match(spec.strip())
    if not match:
        raise AlgebraError(f"algebra must be 'tn:<n>' or 'mn:<n>', got {spec!r}")
    kind, n = match.group(1), int(match.group(2))
    return build_tn(n, domain) if kind == "tn" else build_mn(n, domain)


def algebra_size(spec: str) -> Tuple[str, int]:
    """Split an algebra spec into its kind and n without building it"""
    match = _ALGEBRA_SPEC.match(spec.strip())
    if not match:
        raise AlgebraError(f"algebra must be 'tn:<n>' or 'mn:<n>', got {spec!r}")
    return match.group(1), int(match.group(2))
