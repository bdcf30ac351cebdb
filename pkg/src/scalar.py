"""
Exact scalar domains of characteristic != 2.

Two domains exist: the rationals (values are ``fractions.Fraction`` in lowest
terms) and prime fields F_p for odd primes p (values are canonical residues
``0 <= v < p``).  The domain object owns the arithmetic on raw values so the
hot loops in the solver never allocate wrapper objects; ``Scalar`` is the
public value type that carries its domain along.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from config import settings
from src.errors import ScalarDomainError, ZeroDivisionScalarError

RawScalar = Union[Fraction, int]

_FIELD_SPEC = re.compile(r"^Fp:(\d+)$")


def _is_prime(p: int) -> bool:
    """Trial division primality test"""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class ScalarDomain:
    """An exact field of characteristic 0 (``Q``) or an odd prime p (``Fp:<p>``)."""

    kind: str
    characteristic: int

    def __post_init__(self):
        if self.kind == "Q":
            if self.characteristic != 0:
                raise ScalarDomainError("the rationals have characteristic 0")
            return
        if self.kind != "Fp":
            raise ScalarDomainError(f"unknown scalar domain kind: {self.kind!r}")

        p = self.characteristic
        if p == 2:
            raise ScalarDomainError("characteristic 2 is not allowed: halving must be defined")
        if p > settings.PRIME_FIELD_LIMIT:
            raise ScalarDomainError(
                f"prime {p} exceeds the supported limit {settings.PRIME_FIELD_LIMIT}"
            )
        if not _is_prime(p):
            raise ScalarDomainError(f"{p} is not prime")

    # -- constructors -------------------------------------------------------

    @classmethod
    def rationals(cls) -> "ScalarDomain":
        return cls("Q", 0)

    @classmethod
    def prime_field(cls, p: int) -> "ScalarDomain":
        return cls("Fp", int(p))

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "Fp"

    @property
    def spec(self) -> str:
        """CLI spelling of the domain ("Q" or "Fp:<p>")"""
        return "Q" if self.kind == "Q" else f"Fp:{self.characteristic}"

    def __str__(self) -> str:
        return self.spec

    # -- raw value arithmetic ----------------------------------------------

    def canonical(self, value: Any) -> RawScalar:
        """Bring an int, Fraction or canonical string into canonical form"""
        if isinstance(value, str):
            return self.parse_value(value)
        if self.kind == "Q":
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return value.numerator % self.characteristic
            return self.div(value.numerator % self.characteristic,
                            value.denominator % self.characteristic)
        return int(value) % self.characteristic

    def zero(self) -> RawScalar:
        return Fraction(0) if self.kind == "Q" else 0

    def one(self) -> RawScalar:
        return Fraction(1) if self.kind == "Q" else 1

    def from_int(self, n: int) -> RawScalar:
        return Fraction(n) if self.kind == "Q" else n % self.characteristic

    def add(self, a: RawScalar, b: RawScalar) -> RawScalar:
        if self.kind == "Q":
            return a + b
        return (a + b) % self.characteristic

    def sub(self, a: RawScalar, b: RawScalar) -> RawScalar:
        if self.kind == "Q":
            return a - b
        return (a - b) % self.characteristic

    def mul(self, a: RawScalar, b: RawScalar) -> RawScalar:
        if self.kind == "Q":
            return a * b
        return (a * b) % self.characteristic

    def neg(self, a: RawScalar) -> RawScalar:
        if self.kind == "Q":
            return -a
        return (-a) % self.characteristic

    def inv(self, a: RawScalar) -> RawScalar:
        if a == 0:
            raise ZeroDivisionScalarError(f"division by zero in {self.spec}")
        if self.kind == "Q":
            return 1 / a
        return pow(a, -1, self.characteristic)

    def div(self, a: RawScalar, b: RawScalar) -> RawScalar:
        if self.kind == "Q":
            if b == 0:
                raise ZeroDivisionScalarError(f"division by zero in {self.spec}")
            return a / b
        return (a * self.inv(b)) % self.characteristic

    def halve(self, a: RawScalar) -> RawScalar:
        if self.kind == "Q":
            return a / 2
        return (a * ((self.characteristic + 1) // 2)) % self.characteristic

    def is_zero(self, a: RawScalar) -> bool:
        return a == 0

    # -- text and sampling --------------------------------------------------

    def format(self, a: RawScalar) -> str:
        """Canonical spelling used in every JSON report"""
        return str(a)

    def parse_value(self, text: str) -> RawScalar:
        try:
            if self.kind == "Q":
                return Fraction(text.strip())
            return self.canonical(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise ScalarDomainError(f"cannot read {text!r} as a scalar of {self.spec}: {e}")

    def random_value(self, rng) -> RawScalar:
        """Small integers over Q, uniform residues over F_p"""
        if self.kind == "Q":
            radius = settings.SAMPLE_RADIUS
            return Fraction(int(rng.integers(-radius, radius + 1)))
        return int(rng.integers(0, self.characteristic))


def parse_domain(spec: str) -> ScalarDomain:
    """Parse "Q" or "Fp:<p>" into a ScalarDomain"""
    spec = spec.strip()
    if spec == "Q":
        return ScalarDomain.rationals()
    match = _FIELD_SPEC.match(spec)
    if not match:
        raise ScalarDomainError(f"field must be 'Q' or 'Fp:<p>', got {spec!r}")
    return ScalarDomain.prime_field(int(match.group(1)))


@dataclass(frozen=True)
class Scalar:
    """An exact scalar tied to its domain; equality is structural."""

    domain: ScalarDomain
    value: RawScalar

    def __post_init__(self):
        object.__setattr__(self, "value", self.domain.canonical(self.value))

    @classmethod
    def of(cls, domain: ScalarDomain, value: Any) -> "Scalar":
        return cls(domain, domain.canonical(value))

    def _check(self, other: "Scalar") -> None:
        if not isinstance(other, Scalar):
            raise ScalarDomainError(f"expected a Scalar, got {type(other).__name__}")
        if other.domain != self.domain:
            raise ScalarDomainError(
                f"domain mismatch: {self.domain.spec} vs {other.domain.spec}"
            )

    def __add__(self, other):
        return scalar_arith(self, other, "add")

    def __sub__(self, other):
        return scalar_arith(self, other, "sub")

    def __mul__(self, other):
        return scalar_arith(self, other, "mul")

    def __truediv__(self, other):
        return scalar_arith(self, other, "div")

    def __neg__(self):
        return Scalar(self.domain, self.domain.neg(self.value))

    def is_zero(self) -> bool:
        return self.domain.is_zero(self.value)

    def __str__(self) -> str:
        return self.domain.format(self.value)


_OPS = {
    "add": ScalarDomain.add,
    "sub": ScalarDomain.sub,
    "mul": ScalarDomain.mul,
    "div": ScalarDomain.div,
}


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Exact add/sub/mul/div of two scalars from the same domain"""
    a._check(b)
    try:
        fn = _OPS[op]
    except KeyError:
        raise ScalarDomainError(f"unknown scalar operation {op!r}")
    return Scalar(a.domain, fn(a.domain, a.value, b.value))


def halve(a: Scalar) -> Scalar:
    """Return a/2; defined because every domain has characteristic != 2"""
    return Scalar(a.domain, a.domain.halve(a.value))
