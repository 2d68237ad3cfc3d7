"""Masking and sharing primitives: cyclic pads, additive splits, linear shares.

Dealers here see every share they produce; which party may look at which
coordinate is the protocol engine's responsibility.  Randomness enters
through a ``draw(k)`` callable returning a uniform integer in [0, k),
which keeps every primitive enumerable by the privacy auditor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldElement, FieldMismatchError
from .functions import Alphabet

ABSCISSAS = (1, 2, 3)


@dataclass(frozen=True)
class PadSymbol:
    """A cyclic shift amount over an ordered alphabet."""

    shift: int
    alphabet: Alphabet

    def __post_init__(self):
        if not 0 <= self.shift < len(self.alphabet):
            raise ValueError(
                f"shift {self.shift} out of range for alphabet of size {len(self.alphabet)}"
            )


def pad_shift(symbol, pad: PadSymbol, direction: str = "encrypt"):
    """Move a symbol along the alphabet ordering, cyclically."""
    i = pad.alphabet.index(symbol)
    k = len(pad.alphabet)
    if direction == "encrypt":
        return pad.alphabet.symbol((i + pad.shift) % k)
    if direction == "decrypt":
        return pad.alphabet.symbol((i - pad.shift) % k)
    raise ValueError(f"unknown direction {direction!r}")


def random_pad(alphabet: Alphabet, draw) -> PadSymbol:
    return PadSymbol(draw(len(alphabet)), alphabet)


def additive_split(secret: FieldElement, draw) -> tuple[FieldElement, FieldElement]:
    """Two uniform-looking field values summing to the secret."""
    share_a = secret.field.element(draw(secret.field.modulus))
    return share_a, secret - share_a


@dataclass(frozen=True)
class ShareTriple:
    """Evaluations of one polynomial at the fixed abscissas 1, 2, 3."""

    at_1: FieldElement
    at_2: FieldElement
    at_3: FieldElement

    def __post_init__(self):
        if self.at_1.field != self.at_2.field or self.at_1.field != self.at_3.field:
            raise FieldMismatchError("share triple spans different fields")

    @property
    def field(self):
        return self.at_1.field

    def coordinate(self, abscissa: int) -> FieldElement:
        if abscissa not in ABSCISSAS:
            raise ValueError(f"abscissa must be one of {ABSCISSAS}, got {abscissa}")
        return (self.at_1, self.at_2, self.at_3)[abscissa - 1]


def degree1_share(secret: FieldElement, draw) -> ShareTriple:
    """Shares of a random line through the secret: slope*q + secret at q=1,2,3.

    Any single coordinate is marginally uniform; any two recover the
    secret by linear interpolation.
    """
    field = secret.field
    slope = field.element(draw(field.modulus))
    return ShareTriple(
        slope + secret,
        slope.scale(2) + secret,
        slope.scale(3) + secret,
    )


def triple_pointwise(a: ShareTriple, b: ShareTriple | None = None,
                     op: str = "add", scalar: FieldElement | None = None) -> ShareTriple:
    """Coordinate-wise combination of share triples.

    add and scale keep a degree-1 sharing of the combined secret; mul
    yields coordinates of a degree-2 polynomial whose constant term is
    the product of the secrets.
    """
    if op in ("add", "mul"):
        if b is None:
            raise ValueError(f"operation {op!r} needs a second triple")
        if a.field != b.field:
            raise FieldMismatchError("triples from different fields")
        if op == "add":
            return ShareTriple(a.at_1 + b.at_1, a.at_2 + b.at_2, a.at_3 + b.at_3)
        return ShareTriple(a.at_1 * b.at_1, a.at_2 * b.at_2, a.at_3 * b.at_3)
    if op == "scale":
        if scalar is None:
            raise ValueError("scale needs a scalar field element")
        if a.field != scalar.field:
            raise FieldMismatchError("scalar from a different field")
        return ShareTriple(a.at_1 * scalar, a.at_2 * scalar, a.at_3 * scalar)
    raise ValueError(f"unknown operation {op!r}")
