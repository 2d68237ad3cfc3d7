"""Rational-valued per-symbol functions on finite alphabets.

A :class:`FunctionTable` stores one exact rational per (x, y) pair and is
the single source of truth for the quantity being estimated: the true
sequence value is the average of the table over aligned symbol pairs.
Tables can optionally carry a product form, a list of terms
``(a_k, b_k)`` with ``sum_k a_k(x) * b_k(y)`` equal to the table entry,
which the direct secret-sharing protocol consumes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple

from .field import PrimeField, FieldElement, encode_rational


class OutOfAlphabetError(ValueError):
    """A symbol does not belong to the alphabet in use."""


class TableFormatError(ValueError):
    """A function-table file could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class Alphabet:
    """An ordered finite set of distinct symbol labels.

    The ordering is load-bearing: cyclic pad shifts move along it.
    """

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[str]):
        syms = tuple(symbols)
        if not syms:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(syms)) != len(syms):
            raise ValueError(f"duplicate symbols in alphabet {syms}")
        self.symbols = syms
        self._index = {s: i for i, s in enumerate(syms)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    def index(self, symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise OutOfAlphabetError(f"symbol {symbol!r} not in alphabet {self.symbols}")

    def symbol(self, i: int):
        return self.symbols[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)!r})"


class ProductTerm(NamedTuple):
    a: dict  # x symbol -> Fraction
    b: dict  # y symbol -> Fraction


class FunctionTable:
    """Exact rational values on the grid x_alphabet x y_alphabet."""

    def __init__(self, x_alphabet: Alphabet, y_alphabet: Alphabet, values,
                 product_form=None, name: str = "custom"):
        self.x_alphabet = x_alphabet
        self.y_alphabet = y_alphabet
        it = dict(values)
        table = {}
        for x in x_alphabet:
            for y in y_alphabet:
                if (x, y) not in it:
                    raise ValueError(f"missing table entry for ({x!r}, {y!r})")
                table[(x, y)] = Fraction(it.pop((x, y)))
        if it:
            raise ValueError(f"entries outside the grid: {sorted(it)}")
        self.values = table
        self.name = name
        self.product_form = None
        if product_form is not None:
            self.product_form = self._validate_product_form(product_form)
        self._encoded_cache: dict = {}

    def _validate_product_form(self, terms) -> tuple[ProductTerm, ...]:
        clean = []
        for a_map, b_map in terms:
            a = {x: Fraction(a_map.get(x, 0)) for x in self.x_alphabet}
            b = {y: Fraction(b_map.get(y, 0)) for y in self.y_alphabet}
            for s in a_map:
                if s not in self.x_alphabet:
                    raise OutOfAlphabetError(f"product-form symbol {s!r} not in x alphabet")
            for s in b_map:
                if s not in self.y_alphabet:
                    raise OutOfAlphabetError(f"product-form symbol {s!r} not in y alphabet")
            clean.append(ProductTerm(a, b))
        for x in self.x_alphabet:
            for y in self.y_alphabet:
                total = sum((t.a[x] * t.b[y] for t in clean), Fraction(0))
                if total != self.values[(x, y)]:
                    raise ValueError(
                        f"product form disagrees with table at ({x!r}, {y!r}): "
                        f"{total} != {self.values[(x, y)]}"
                    )
        return tuple(clean)

    def value(self, x, y) -> Fraction:
        try:
            return self.values[(x, y)]
        except KeyError:
            raise OutOfAlphabetError(f"pair ({x!r}, {y!r}) outside the table grid")

    # tables are immutable after construction, so derived scalars are cached

    @cached_property
    def common_denominator(self) -> int:
        d = 1
        for v in self.values.values():
            d = d * v.denominator // math.gcd(d, v.denominator)
        return d

    @cached_property
    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self.values.values()), default=Fraction(0))

    def l2_norm_squared(self) -> Fraction:
        return sum((v * v for v in self.values.values()), Fraction(0))

    def l2_norm(self) -> float:
        return math.sqrt(self.l2_norm_squared())

    def to_field(self, field: PrimeField) -> dict:
        """Encode every entry as d*value mod p, d the common denominator."""
        cached = self._encoded_cache.get(field.modulus)
        if cached is None:
            d = self.common_denominator
            cached = {key: encode_rational(v, d, field)
                      for key, v in self.values.items()}
            self._encoded_cache[field.modulus] = cached
        return cached

    def indicator_product_form(self) -> tuple[ProductTerm, ...]:
        """Fallback decomposition: one term per nonzero cell, always depth one."""
        terms = []
        for (cx, cy), v in self.values.items():
            if v == 0:
                continue
            a = {x: (v if x == cx else Fraction(0)) for x in self.x_alphabet}
            b = {y: (Fraction(1) if y == cy else Fraction(0)) for y in self.y_alphabet}
            terms.append(ProductTerm(a, b))
        if not terms:
            # the zero table still needs one (zero) term so protocols have work to meter
            a = {x: Fraction(0) for x in self.x_alphabet}
            b = {y: Fraction(0) for y in self.y_alphabet}
            terms.append(ProductTerm(a, b))
        return tuple(terms)

    def effective_product_form(self) -> tuple[ProductTerm, ...]:
        if self.product_form is not None:
            return self.product_form
        return self.indicator_product_form()

    def __repr__(self) -> str:
        return (f"FunctionTable({self.name!r}, {len(self.x_alphabet)}x"
                f"{len(self.y_alphabet)})")


def check_sequences(f1: FunctionTable, x_seq, y_seq) -> int:
    if len(x_seq) != len(y_seq):
        raise ValueError(f"sequence lengths differ: {len(x_seq)} vs {len(y_seq)}")
    if not x_seq:
        raise ValueError("sequences must be nonempty")
    for s in x_seq:
        if s not in f1.x_alphabet:
            raise OutOfAlphabetError(f"x symbol {s!r} not in alphabet")
    for s in y_seq:
        if s not in f1.y_alphabet:
            raise OutOfAlphabetError(f"y symbol {s!r} not in alphabet")
    return len(x_seq)


def eval_sum_type(f1: FunctionTable, x_seq, y_seq) -> Fraction:
    """The true value: (1/n) * sum_i f1(x_i, y_i), exactly."""
    n = check_sequences(f1, x_seq, y_seq)
    total = sum((f1.value(x, y) for x, y in zip(x_seq, y_seq)), Fraction(0))
    return total / n


def eval_via_joint_type(f1: FunctionTable, x_seq, y_seq) -> Fraction:
    """Same value computed through the empirical pair distribution."""
    n = check_sequences(f1, x_seq, y_seq)
    counts: dict = {}
    for pair in zip(x_seq, y_seq):
        counts[pair] = counts.get(pair, 0) + 1
    return sum((f1.value(x, y) * Fraction(c, n) for (x, y), c in counts.items()),
               Fraction(0))


def _int_alphabet(size: int) -> Alphabet:
    if size < 1:
        raise ValueError(f"alphabet size must be positive, got {size}")
    return Alphabet(str(i) for i in range(size))


BUILTIN_TABLES = ("hamming", "equality", "squared-difference", "product")


def builtin_table(name: str, size: int = 2) -> FunctionTable:
    """Shipped example tables over the integer alphabet {0..size-1}.

    hamming: 1 where symbols differ.  equality: 1 where they agree.
    squared-difference: (x - y)^2.  product: x * y (a rank-one table).
    Each carries a depth-one product form.
    """
    ab = _int_alphabet(size)
    syms = list(ab)
    if name == "hamming":
        values = {(x, y): Fraction(0 if x == y else 1) for x in syms for y in syms}
        form = [({s: 1}, {t: (0 if t == s else 1) for t in syms}) for s in syms]
    elif name == "equality":
        values = {(x, y): Fraction(1 if x == y else 0) for x in syms for y in syms}
        form = [({s: 1}, {s: 1}) for s in syms]
    elif name == "squared-difference":
        values = {(x, y): Fraction((int(x) - int(y)) ** 2) for x in syms for y in syms}
        form = [
            ({s: int(s) ** 2 for s in syms}, {t: 1 for t in syms}),
            ({s: int(s) for s in syms}, {t: -2 * int(t) for t in syms}),
            ({s: 1 for s in syms}, {t: int(t) ** 2 for t in syms}),
        ]
    elif name == "product":
        values = {(x, y): Fraction(int(x) * int(y)) for x in syms for y in syms}
        form = [({s: int(s) for s in syms}, {t: int(t) for t in syms})]
    else:
        raise ValueError(f"unknown builtin table {name!r} (have {BUILTIN_TABLES})")
    return FunctionTable(ab, ab, values, product_form=form, name=f"{name}:{size}")


def _parse_rational(token: str, line_no: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise TableFormatError(f"bad rational {token!r}", line_no)


def parse_table(text: str, name: str = "file") -> FunctionTable:
    """Parse the plain-text table format.

    Layout::

        # comments and blank lines are ignored
        x: 0 1          # x alphabet, ordered
        y: 0 1          # y alphabet, ordered
        0 0 0           # one line per (x, y): x y value, value a rational
        0 1 1/2
        1 0 1/2
        1 1 0
        product_form:   # optional section
        term:
        a 0 1           # a <x-symbol> <rational>; omitted symbols are 0
        b 1 1/2         # b <y-symbol> <rational>

    Every grid cell must appear exactly once.  Each ``term:`` block
    contributes a_k(x) * b_k(y) and the blocks must sum to the table.
    """
    x_ab: Alphabet | None = None
    y_ab: Alphabet | None = None
    values: dict = {}
    form_terms: list[tuple[dict, dict]] = []
    in_form = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("x:"):
            if x_ab is not None:
                raise TableFormatError("duplicate x alphabet", line_no)
            x_ab = Alphabet(line[2:].split())
            continue
        if line.startswith("y:"):
            if y_ab is not None:
                raise TableFormatError("duplicate y alphabet", line_no)
            y_ab = Alphabet(line[2:].split())
            continue
        if line == "product_form:":
            in_form = True
            continue
        if line == "term:":
            if not in_form:
                raise TableFormatError("term: before product_form:", line_no)
            form_terms.append(({}, {}))
            continue
        parts = line.split()
        if in_form:
            if len(parts) != 3 or parts[0] not in ("a", "b"):
                raise TableFormatError(f"bad product-form line {line!r}", line_no)
            if not form_terms:
                raise TableFormatError("product-form line before term:", line_no)
            side = 0 if parts[0] == "a" else 1
            form_terms[-1][side][parts[1]] = _parse_rational(parts[2], line_no)
            continue
        if x_ab is None or y_ab is None:
            raise TableFormatError("table entry before alphabets", line_no)
        if len(parts) != 3:
            raise TableFormatError(f"expected 'x y value', got {line!r}", line_no)
        key = (parts[0], parts[1])
        if key in values:
            raise TableFormatError(f"duplicate entry for {key}", line_no)
        values[key] = _parse_rational(parts[2], line_no)
    if x_ab is None or y_ab is None:
        raise TableFormatError("missing alphabet header")
    try:
        return FunctionTable(x_ab, y_ab, values,
                             product_form=form_terms or None, name=name)
    except (ValueError, OutOfAlphabetError) as exc:
        raise TableFormatError(str(exc))


def load_table(path) -> FunctionTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_table(fh.read(), name=str(path))


def resolve_table(name_or_path: str, size: int = 2) -> FunctionTable:
    """Builtin name (optionally 'name:size') or a path to a table file."""
    base, _, suffix = name_or_path.partition(":")
    if base in BUILTIN_TABLES:
        if suffix:
            try:
                size = int(suffix)
            except ValueError:
                raise ValueError(f"bad alphabet size in {name_or_path!r}")
        return builtin_table(base, size)
    return load_table(name_or_path)
