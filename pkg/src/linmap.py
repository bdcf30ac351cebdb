"""
Linear endomorphisms of an Algebra and the (f, g, h) triples built from them.

A LinearMap stores its dim x dim table column by column: ``table[k]`` is the
coefficient vector of the image of basis element b_k.  Triples flatten to
packed vectors in the frozen "fgh-column-major" layout: the f table column by
column, then g, then h, so entry (m, k) of map number t sits at
``t * dim**2 + k * dim + m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

from src.algebra import Algebra, Element, jordan_product, multiply
from src.errors import AlgebraError, LayoutError
from src.scalar import RawScalar, Scalar

MAP_NAMES = ("f", "g", "h")


@dataclass(frozen=True)
class LinearMap:
    algebra: Algebra
    table: Tuple[Tuple[RawScalar, ...], ...]

    def __post_init__(self):
        dim = self.algebra.dim
        if len(self.table) != dim or any(len(col) != dim for col in self.table):
            raise LayoutError(f"a map on {self.algebra.name} needs a {dim}x{dim} table")

    @classmethod
    def from_function(cls, algebra: Algebra, fn: Callable[[Element], Element]) -> "LinearMap":
        """Tabulate fn on the basis"""
        columns = []
        for k in range(algebra.dim):
            image = fn(algebra.basis_element(k))
            if image.algebra != algebra:
                raise AlgebraError("map image lies in a different algebra")
            columns.append(image.coeffs)
        return cls(algebra, tuple(columns))

    @classmethod
    def zero(cls, algebra: Algebra) -> "LinearMap":
        z = algebra.domain.zero()
        return cls(algebra, tuple((z,) * algebra.dim for _ in range(algebra.dim)))

    @classmethod
    def identity(cls, algebra: Algebra) -> "LinearMap":
        return cls.from_function(algebra, lambda x: x)

    @classmethod
    def random(cls, algebra: Algebra, rng) -> "LinearMap":
        dom = algebra.domain
        return cls(algebra, tuple(
            tuple(dom.random_value(rng) for _ in range(algebra.dim)) for _ in range(algebra.dim)
        ))

    def image_of(self, k: int) -> Element:
        return Element(self.algebra, self.table[k])

    def entry(self, m: int, k: int) -> RawScalar:
        """Coefficient of b_m in the image of b_k"""
        return self.table[k][m]

    def __call__(self, x: Element) -> Element:
        return apply(self, x)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        self._same(other)
        add = self.algebra.domain.add
        return LinearMap(self.algebra, tuple(
            tuple(add(a, b) for a, b in zip(c1, c2)) for c1, c2 in zip(self.table, other.table)
        ))

    def __neg__(self) -> "LinearMap":
        neg = self.algebra.domain.neg
        return LinearMap(self.algebra, tuple(tuple(neg(a) for a in col) for col in self.table))

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return self + (-other)

    def scale(self, alpha) -> "LinearMap":
        dom = self.algebra.domain
        alpha = dom.canonical(alpha.value if isinstance(alpha, Scalar) else alpha)
        return LinearMap(self.algebra, tuple(
            tuple(dom.mul(alpha, a) for a in col) for col in self.table
        ))

    def is_zero(self) -> bool:
        return all(a == 0 for col in self.table for a in col)

    def _same(self, other: "LinearMap") -> None:
        if not isinstance(other, LinearMap) or other.algebra != self.algebra:
            raise AlgebraError("maps act on different algebras")

    def to_json(self) -> Dict[str, Dict[str, str]]:
        return {
            f"image_of({b.label[0]},{b.label[1]})": self.image_of(b.ordinal).to_json()
            for b in self.algebra.basis
        }


def apply(m: LinearMap, x: Element) -> Element:
    """table . coeffs"""
    if x.algebra != m.algebra:
        raise AlgebraError(f"cannot apply a map on {m.algebra.name} to an element of {x.algebra.name}")
    dom = m.algebra.domain
    out = [dom.zero()] * m.algebra.dim
    for k, xk in enumerate(x.coeffs):
        if xk == 0:
            continue
        for i, c in enumerate(m.table[k]):
            if c != 0:
                out[i] = dom.add(out[i], dom.mul(c, xk))
    return Element(m.algebra, tuple(out))


def jordan_mult_operator(a: Element) -> LinearMap:
    """x -> a o x"""
    return LinearMap.from_function(a.algebra, lambda x: jordan_product(a, x))


def inner_derivation(a: Element) -> LinearMap:
    """x -> ax - xa"""
    return LinearMap.from_function(a.algebra, lambda x: multiply(a, x) - multiply(x, a))


@dataclass(frozen=True)
class DerivationTriple:
    """The maps (f, g, h) that Eq. f(xy) = g(x)y + xh(y) and its Jordan form constrain."""

    f: LinearMap
    g: LinearMap
    h: LinearMap

    def __post_init__(self):
        if not (self.f.algebra == self.g.algebra == self.h.algebra):
            raise AlgebraError("f, g and h must act on one algebra")

    @property
    def algebra(self) -> Algebra:
        return self.f.algebra

    @classmethod
    def zero(cls, algebra: Algebra) -> "DerivationTriple":
        z = LinearMap.zero(algebra)
        return cls(z, z, z)

    @classmethod
    def random(cls, algebra: Algebra, rng) -> "DerivationTriple":
        return cls(LinearMap.random(algebra, rng), LinearMap.random(algebra, rng),
                   LinearMap.random(algebra, rng))

    def maps(self) -> Tuple[LinearMap, LinearMap, LinearMap]:
        return (self.f, self.g, self.h)

    def to_json(self) -> Dict[str, dict]:
        return {name: m.to_json() for name, m in zip(MAP_NAMES, self.maps())}


def packed_length(algebra: Algebra) -> int:
    return 3 * algebra.dim * algebra.dim


def column_index(dim: int, map_number: int, m: int, k: int) -> int:
    """Packed position of entry (m, k) of f (0), g (1) or h (2)"""
    return map_number * dim * dim + k * dim + m


def triple_pack(t: DerivationTriple) -> Tuple[RawScalar, ...]:
    return tuple(a for m in t.maps() for col in m.table for a in col)


def triple_unpack(v: Sequence[RawScalar], algebra: Algebra) -> DerivationTriple:
    dim = algebra.dim
    if len(v) != packed_length(algebra):
        raise LayoutError(
            f"packed triple for {algebra.name} has length {packed_length(algebra)}, got {len(v)}"
        )
    dom = algebra.domain
    values = [dom.canonical(a) for a in v]
    maps = []
    for t in range(3):
        block = values[t * dim * dim:(t + 1) * dim * dim]
        maps.append(LinearMap(algebra, tuple(
            tuple(block[k * dim:(k + 1) * dim]) for k in range(dim)
        )))
    return DerivationTriple(*maps)
