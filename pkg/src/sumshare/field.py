"""Exact arithmetic in small prime fields, with signed rational encode/decode."""

from __future__ import annotations

from fractions import Fraction


class FieldMismatchError(ValueError):
    """Two elements from different fields were combined."""


class EncodingRangeError(ValueError):
    """A rational falls outside the signed headroom of the field."""


def is_prime(n: int) -> bool:
    """Deterministic trial division; the moduli used here stay small."""
    if n < 2:
        return False
    for f in (2, 3):
        if n % f == 0:
            return n == f
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def next_prime_above(n: int) -> int:
    """Smallest prime strictly greater than n."""
    c = n + 1
    while not is_prime(c):
        c += 1
    return c


def ceil_log2(k: int) -> int:
    """Bits needed to address k distinct values; 0 for a single value."""
    if k < 1:
        raise ValueError(f"cannot take log of {k}")
    return (k - 1).bit_length()


class PrimeField:
    """The field of integers modulo a prime p >= 3."""

    __slots__ = ("modulus", "bits_per_element")

    def __init__(self, modulus: int):
        if modulus < 3:
            raise ValueError(f"modulus must be at least 3, got {modulus}")
        if not is_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        self.modulus = modulus
        self.bits_per_element = ceil_log2(modulus)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.modulus, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash(("PrimeField", self.modulus))

    def __repr__(self) -> str:
        return f"PrimeField({self.modulus})"


class FieldElement:
    """A value in [0, p) tied to its field; all operators are exact mod p."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        if not 0 <= value < field.modulus:
            raise ValueError(f"value {value} out of range for modulus {field.modulus}")
        self.value = value
        self.field = field

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if self.field != other.field:
            raise FieldMismatchError(
                f"mixed moduli {self.field.modulus} and {other.field.modulus}"
            )

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value + other.value) % self.field.modulus, self.field)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value - other.value) % self.field.modulus, self.field)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value * other.value) % self.field.modulus, self.field)

    def __neg__(self) -> "FieldElement":
        return FieldElement((-self.value) % self.field.modulus, self.field)

    def inverse(self) -> "FieldElement":
        # Fermat: a^(p-2) = a^(-1) for a != 0.
        if self.value == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        p = self.field.modulus
        return FieldElement(pow(self.value, p - 2, p), self.field)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self * other.inverse()

    def scale(self, k: int) -> "FieldElement":
        return FieldElement((self.value * k) % self.field.modulus, self.field)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldElement)
            and self.value == other.value
            and self.field == other.field
        )

    def __hash__(self) -> int:
        return hash((self.value, self.field.modulus))

    def __repr__(self) -> str:
        return f"FieldElement({self.value} mod {self.field.modulus})"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply one of {add, sub, mul, inv_mul} to two elements of the same field."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv_mul":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def min_field_size(f1, m: int, min_prime: int = 3):
    """Smallest prime field that can carry a sum of m table entries.

    The modulus is the smallest prime p > 2*m*D*max|f1| (D is the least
    common denominator of the table), never below ``min_prime``.  The
    factor 2 reserves headroom so centered decoding of signed sums stays
    unambiguous.
    """
    if m < 1:
        raise ValueError(f"sample count must be positive, got {m}")
    d = f1.common_denominator
    scaled_max = max((abs(v) * d for v in f1.values.values()), default=Fraction(0))
    if scaled_max.denominator != 1:
        raise ValueError("common denominator does not clear the table")
    bound = 2 * m * int(scaled_max)
    return PrimeField(next_prime_above(max(bound, min_prime - 1)))


def encode_rational(q: Fraction, d: int, field: PrimeField) -> FieldElement:
    """Map q (with q*d integral) to the centered residue of q*d mod p."""
    scaled = Fraction(q) * d
    if scaled.denominator != 1:
        raise ValueError(f"{q} * {d} is not an integer")
    v = int(scaled)
    if 2 * abs(v) >= field.modulus:
        raise EncodingRangeError(
            f"|{v}| exceeds signed headroom of modulus {field.modulus}"
        )
    return field.element(v)


def decode_centered(e: FieldElement, d: int, scale: int) -> Fraction:
    """Read e as the signed integer in (-p/2, p/2), then divide by d*scale."""
    p = e.field.modulus
    v = e.value if 2 * e.value < p else e.value - p
    return Fraction(v, d * scale)


def interpolate_at_zero(points) -> FieldElement:
    """Evaluate at 0 the unique polynomial through the given (abscissa, value) points.

    Abscissas must be distinct and nonzero.  Plain Lagrange weights:
    L_i(0) = prod_{j != i} x_j / (x_j - x_i).
    """
    points = list(points)
    if not points:
        raise ValueError("no points to interpolate")
    fld = points[0][0].field
    seen = set()
    for x, y in points:
        if x.field != fld or y.field != fld:
            raise FieldMismatchError("interpolation points from different fields")
        if x.value == 0:
            raise ValueError("abscissa 0 is the evaluation point itself")
        if x.value in seen:
            raise ValueError(f"duplicate abscissa {x.value}")
        seen.add(x.value)
    acc = fld.zero()
    for i, (xi, yi) in enumerate(points):
        num = fld.one()
        den = fld.one()
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            num = num * xj
            den = den * (xj - xi)
        acc = acc + yi * (num / den)
    return acc
