"""Three-party protocol machine: channels, transcripts, bit meter, drivers.

A run is strictly sequential and deterministic given (inputs, parameters,
seed).  Every message crosses the in-process :class:`Transport`, which is
the only path between parties; party-local code only reads values out of
messages addressed to it.  All randomness flows through per-party draw
sources so the privacy auditor can swap in exhaustive-enumeration tapes.

The aggregating party (charlie) is never shown the sampled locations:
sample-indexed data travels to him in slot order only.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .field import (PrimeField, ceil_log2, decode_centered, interpolate_at_zero,
                    min_field_size, next_prime_above)
from .functions import FunctionTable, check_sequences
from .sampling import IndexSet, fisher_yates_subset, partial_frequency
from .sharing import PadSymbol, additive_split, degree1_share, pad_shift

ALICE, BOB, CHARLIE = "alice", "bob", "charlie"
PARTIES = (ALICE, BOB, CHARLIE)
ABSCISSA = {ALICE: 1, BOB: 2, CHARLIE: 3}


class ProtocolInputError(ValueError):
    """Inputs or parameters cannot form a valid run."""


class FieldCapacityError(ValueError):
    """The chosen field cannot carry this run's sums unambiguously."""


class ProtocolInternalError(RuntimeError):
    """An internal consistency check failed mid-run; aborting with context."""


class TapeMismatchError(RuntimeError):
    """An enumeration tape did not match the protocol's draw sequence."""


# ----------------------------------------------------------------------
# randomness sources


class DrawSource:
    """Uniform integer draws below a bound, logged into a party's view."""

    def __init__(self):
        self._sink = None

    def bind(self, sink: list) -> None:
        self._sink = sink

    def below(self, k: int, label: str) -> int:
        if k < 1:
            raise ValueError(f"draw bound must be positive, got {k}")
        v = self._draw(k, label)
        if self._sink is not None:
            self._sink.append((label, v))
        return v

    def _draw(self, k: int, label: str) -> int:
        raise NotImplementedError


class SeededSource(DrawSource):
    """Pseudorandom draws from a stream split off the run seed."""

    def __init__(self, stream_id: str):
        super().__init__()
        self._rng = random.Random(stream_id)

    def _draw(self, k: int, label: str) -> int:
        return self._rng.randrange(k)


class TapeSource(DrawSource):
    """Replays a fixed tape of draw values; used by the auditor."""

    def __init__(self, tape):
        super().__init__()
        self._tape = list(tape)
        self._pos = 0

    def _draw(self, k: int, label: str) -> int:
        if self._pos >= len(self._tape):
            raise TapeMismatchError(f"tape exhausted at draw {label!r}")
        v = self._tape[self._pos]
        self._pos += 1
        if not 0 <= v < k:
            raise TapeMismatchError(f"tape value {v} out of range {k} at {label!r}")
        return v

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._tape)


class ProbeSource(DrawSource):
    """Returns zero and records each draw's range; used to size tapes."""

    def __init__(self):
        super().__init__()
        self.ranges: list[tuple[str, int]] = []

    def _draw(self, k: int, label: str) -> int:
        self.ranges.append((label, k))
        return 0


def make_seeded_sources(protocol: str, seed) -> dict:
    """Independent per-party streams split deterministically from one seed."""
    return {p: SeededSource(f"{protocol}:{seed}:{p}") for p in PARTIES}


# ----------------------------------------------------------------------
# messages, views, transport


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    round_no: int
    tag: str
    values: tuple
    bit_cost: int

    def payload_hex(self) -> str:
        return ",".join(str(v) for v in self.values).encode("ascii").hex()

    def line(self) -> str:
        return (f"{self.round_no} {self.sender}→{self.receiver} "
                f"{self.tag} {self.bit_cost} {self.payload_hex()}")


@dataclass
class View:
    party: str
    local_randomness: list = dc_field(default_factory=list)
    messages_sent: list = dc_field(default_factory=list)
    messages_received: list = dc_field(default_factory=list)
    output: Fraction | None = None

    def canonical(self) -> str:
        """Injective, deterministic serialization of everything this party saw."""
        lines = [f"view {self.party}"]
        for label, value in self.local_randomness:
            lines.append(f"rand {label}={value}")
        for msg in self.messages_sent:
            lines.append(f"sent {msg.line()}")
        for msg in self.messages_received:
            lines.append(f"recv {msg.line()}")
        lines.append(f"output {self.output if self.output is not None else 'none'}")
        return "\n".join(lines)


class Transport:
    """Three error-free pairwise channels with program-order delivery."""

    def __init__(self, views: dict):
        self.views = views
        self.messages: list[Message] = []
        self.total_bits = 0

    def send(self, sender: str, receiver: str, round_no: int, tag: str,
             values, bit_cost: int) -> Message:
        if sender == receiver or sender not in self.views or receiver not in self.views:
            raise ValueError(f"bad channel {sender}->{receiver}")
        msg = Message(sender, receiver, round_no, tag, tuple(values), bit_cost)
        self.messages.append(msg)
        self.total_bits += bit_cost
        self.views[sender].messages_sent.append(msg)
        self.views[receiver].messages_received.append(msg)
        return msg


# ----------------------------------------------------------------------
# run results


@dataclass(frozen=True)
class RunParams:
    protocol: str
    n: int
    m: int
    modulus: int
    seed: object
    f1_name: str
    rank: int | None = None


@dataclass
class ProtocolResult:
    protocol: str
    estimate: Fraction
    views: dict
    total_bits: int
    params: RunParams
    index_set: IndexSet

    @property
    def rate(self) -> Fraction:
        return Fraction(self.total_bits, self.params.n)

    def transcript(self) -> str:
        """Line-oriented dump: every message, then each party's randomness."""
        lines = [m.line() for m in self._ordered_messages()]
        for p in PARTIES:
            for label, value in self.views[p].local_randomness:
                lines.append(f"randomness {p} {label}={value}")
        lines.append(f"output charlie {self.estimate}")
        return "\n".join(lines) + "\n"

    def _ordered_messages(self):
        seen = []
        for p in PARTIES:
            seen.extend(self.views[p].messages_sent)
        seen.sort(key=lambda m: (m.round_no, m.sender, m.tag))
        return seen


# ----------------------------------------------------------------------
# shared run plumbing


def _setup(protocol: str, f1: FunctionTable, x_seq, y_seq, m: int, seed,
           sources):
    n = check_sequences(f1, x_seq, y_seq)
    if not 1 <= m <= n:
        raise ProtocolInputError(f"need 1 <= m <= n, got m={m}, n={n}")
    if sources is None:
        if seed is None:
            raise ProtocolInputError("a seed is required when sources are not given")
        sources = make_seeded_sources(protocol, seed)
    views = {p: View(party=p) for p in PARTIES}
    for p in PARTIES:
        sources[p].bind(views[p].local_randomness)
    return n, sources, views, Transport(views)


def distribute_index_set(transport: Transport, alice_source: DrawSource,
                         n: int, m: int, index_set: IndexSet | None = None,
                         round_no: int = 1) -> IndexSet:
    """Alice picks the sample locations (or reuses fixed ones) and tells Bob.

    Sent sorted ascending, one fixed-width index per location.
    """
    if index_set is None:
        counter = itertools.count()
        picks = fisher_yates_subset(
            n, m, lambda k: alice_source.below(k, f"subsample[{next(counter)}]"))
        index_set = IndexSet(picks, n)
    else:
        if index_set.n != n or index_set.m != m:
            raise ProtocolInputError(
                f"fixed index set has (n={index_set.n}, m={index_set.m}), "
                f"run has (n={n}, m={m})")
    transport.send(ALICE, BOB, round_no, "index-set", index_set.indices,
                   m * ceil_log2(n))
    return index_set


def _require_capacity(fld: PrimeField, scaled_max: int, m: int) -> None:
    bound = 2 * m * scaled_max
    if fld.modulus <= bound:
        raise FieldCapacityError(
            f"modulus {fld.modulus} cannot hold sums up to {bound} unambiguously")


def _require_poly_field(fld: PrimeField) -> None:
    # abscissas 1, 2, 3 must stay distinct and nonzero mod p
    if fld.modulus < 5:
        raise FieldCapacityError(
            f"polynomial sharing at abscissas 1..3 needs a modulus of at least 5, "
            f"got {fld.modulus}")


def _table_scaled_max(f1: FunctionTable) -> int:
    return int(f1.max_abs * f1.common_denominator)


def field_for_otp(f1: FunctionTable, m: int) -> PrimeField:
    return min_field_size(f1, m)


def field_for_poly(f1: FunctionTable, m: int) -> PrimeField:
    return min_field_size(f1, m, min_prime=5)


def _product_form_denominators(form) -> tuple[int, int]:
    import math as _math
    d_a = d_b = 1
    for term in form:
        for v in term.a.values():
            d_a = d_a * v.denominator // _math.gcd(d_a, v.denominator)
        for v in term.b.values():
            d_b = d_b * v.denominator // _math.gcd(d_b, v.denominator)
    return d_a, d_b


def field_for_poly_direct(f1: FunctionTable, m: int,
                          form=None) -> PrimeField:
    """Sized for the product form: decoded sums carry its combined denominator."""
    if form is None:
        form = f1.effective_product_form()
    d_a, d_b = _product_form_denominators(form)
    scaled_max = int(f1.max_abs * d_a * d_b)
    bound = 2 * m * scaled_max
    return PrimeField(next_prime_above(max(bound, 4)))


# ----------------------------------------------------------------------
# protocol 'otp': one-time pads and additive shares


def run_protocol_otp(f1: FunctionTable, x_seq, y_seq, m: int, seed=None, *,
                     field: PrimeField | None = None, sources=None,
                     index_set: IndexSet | None = None) -> ProtocolResult:
    """Estimate through pad-masked symbols and additively split count matrices.

    Flow: alice sends the sample locations to bob; both send pad-masked
    sampled symbols to charlie; charlie turns each masked pair into an
    indicator matrix, splits it additively and returns one share stream
    to each of them; they exchange pads, unmask their count shares, fold
    in the table weights, and return salted sum shares that charlie
    recombines and decodes.
    """
    if field is None:
        field = field_for_otp(f1, m)
    _require_capacity(field, _table_scaled_max(f1), m)
    n, sources, views, transport = _setup("otp", f1, x_seq, y_seq, m, seed,
                                          sources)
    xa, ya = f1.x_alphabet, f1.y_alphabet
    d = f1.common_denominator
    weights = f1.to_field(field)
    cells = [(sx, sy) for sx in xa.symbols for sy in ya.symbols]
    bpe = field.bits_per_element

    idx = distribute_index_set(transport, sources[ALICE], n, m, index_set)
    slots = idx.indices

    # alice and bob mask their sampled symbols with fresh cyclic pads
    alice_pads = [PadSymbol(sources[ALICE].below(len(xa), f"pad-x[{j}]"), xa)
                  for j in range(m)]
    masked_x = tuple(xa.index(pad_shift(x_seq[i - 1], alice_pads[j]))
                     for j, i in enumerate(slots))
    mx_msg = transport.send(ALICE, CHARLIE, 2, "masked-x", masked_x,
                            m * ceil_log2(len(xa)))
    bob_pads = [PadSymbol(sources[BOB].below(len(ya), f"pad-y[{j}]"), ya)
                for j in range(m)]
    masked_y = tuple(ya.index(pad_shift(y_seq[i - 1], bob_pads[j]))
                     for j, i in enumerate(slots))
    my_msg = transport.send(BOB, CHARLIE, 3, "masked-y", masked_y,
                            m * ceil_log2(len(ya)))

    # charlie: indicator matrix per slot, split into two additive streams
    recv_x = [xa.symbol(v) for v in mx_msg.values]
    recv_y = [ya.symbol(v) for v in my_msg.values]
    shares_a = []
    shares_b = []
    for j in range(m):
        row_a = {}
        row_b = {}
        for (sx, sy) in cells:
            ind = field.element(1 if (recv_x[j], recv_y[j]) == (sx, sy) else 0)
            sa, sb = additive_split(
                ind, lambda k, j=j, sx=sx, sy=sy:
                sources[CHARLIE].below(k, f"matrix-share[{j}][{sx},{sy}]"))
            row_a[(sx, sy)] = sa
            row_b[(sx, sy)] = sb
        shares_a.append(row_a)
        shares_b.append(row_b)
    mat_bits = m * len(xa) * len(ya) * bpe
    ma_msg = transport.send(CHARLIE, ALICE, 4, "count-shares-a",
                            tuple(shares_a[j][c].value for j in range(m)
                                  for c in cells), mat_bits)
    mb_msg = transport.send(CHARLIE, BOB, 4, "count-shares-b",
                            tuple(shares_b[j][c].value for j in range(m)
                                  for c in cells), mat_bits)

    # pad exchange
    pa_msg = transport.send(ALICE, BOB, 5, "pads-x",
                            tuple(p.shift for p in alice_pads),
                            m * ceil_log2(len(xa)))
    pb_msg = transport.send(BOB, ALICE, 5, "pads-y",
                            tuple(p.shift for p in bob_pads),
                            m * ceil_log2(len(ya)))

    cell_pos = {c: i for i, c in enumerate(cells)}

    def unmask_and_weigh(share_msg, x_pads, y_pads):
        rows = share_msg.values
        acc_weighted = field.zero()
        counts = {}
        for (sx, sy) in cells:
            acc = field.zero()
            for j in range(m):
                ux = pad_shift(sx, x_pads[j])
                uy = pad_shift(sy, y_pads[j])
                acc = acc + field.element(rows[j * len(cells) + cell_pos[(ux, uy)]])
            counts[(sx, sy)] = acc
            acc_weighted = acc_weighted + weights[(sx, sy)] * acc
        return counts, acc_weighted

    recv_beta = [PadSymbol(v, ya) for v in pb_msg.values]
    counts_a, f_a = unmask_and_weigh(ma_msg, alice_pads, recv_beta)
    recv_alpha = [PadSymbol(v, xa) for v in pa_msg.values]
    counts_b, f_b = unmask_and_weigh(mb_msg, recv_alpha, bob_pads)

    # simulator-level consistency check: the two count streams must add
    # up to the plaintext sample counts
    plain = partial_frequency(x_seq, y_seq, idx)
    for cell in cells:
        expect = field.element(plain.counts.get(cell, 0))
        if counts_a[cell] + counts_b[cell] != expect:
            raise ProtocolInternalError(
                f"count shares at {cell} recombine to "
                f"{(counts_a[cell] + counts_b[cell]).value}, expected {expect.value}")

    # salted sum shares back to charlie
    salt = field.element(sources[ALICE].below(field.modulus, "salt"))
    z_msg = transport.send(ALICE, BOB, 6, "salt", (salt.value,), bpe)
    fa_msg = transport.send(ALICE, CHARLIE, 7, "masked-sum-a",
                            ((f_a + salt).value,), bpe)
    bob_salt = field.element(z_msg.values[0])
    fb_msg = transport.send(BOB, CHARLIE, 7, "masked-sum-b",
                            ((f_b - bob_salt).value,), bpe)

    total = field.element(fa_msg.values[0]) + field.element(fb_msg.values[0])
    estimate = decode_centered(total, d, m)
    views[CHARLIE].output = estimate
    params = RunParams("otp", n, m, field.modulus, seed, f1.name)
    return ProtocolResult("otp", estimate, views, transport.total_bits, params, idx)


# ----------------------------------------------------------------------
# protocol 'poly-l': linear shares of per-slot symbol indicators


def run_protocol_poly_l(f1: FunctionTable, x_seq, y_seq, m: int, seed=None, *,
                        field: PrimeField | None = None, sources=None,
                        index_set: IndexSet | None = None) -> ProtocolResult:
    """Estimate through linear sharing of the per-slot symbol indicators.

    Alice deals a random line through 1{x_i = x} for every sampled slot
    and symbol, keeping the evaluation at 1 and sending 2 to bob and 3 to
    charlie; bob mirrors this for his symbols.  Each party then evaluates
    the table-weighted sum of indicator products at its own abscissa, the
    evaluations at 1 and 2 travel to charlie, and interpolating at zero
    recovers the scaled sample sum.
    """
    if field is None:
        field = field_for_poly(f1, m)
    _require_poly_field(field)
    _require_capacity(field, _table_scaled_max(f1), m)
    n, sources, views, transport = _setup("poly-l", f1, x_seq, y_seq, m, seed,
                                          sources)
    xa, ya = f1.x_alphabet, f1.y_alphabet
    d = f1.common_denominator
    weights = f1.to_field(field)
    bpe = field.bits_per_element

    idx = distribute_index_set(transport, sources[ALICE], n, m, index_set)
    slots = idx.indices

    # alice deals indicator lines
    g = {}
    for j, i in enumerate(slots):
        for sx in xa.symbols:
            secret = field.element(1 if x_seq[i - 1] == sx else 0)
            g[(j, sx)] = degree1_share(
                secret, lambda k, j=j, sx=sx:
                sources[ALICE].below(k, f"slope-x[{j}][{sx}]"))
    order_x = [(j, sx) for j in range(m) for sx in xa.symbols]
    share_bits_x = m * len(xa) * bpe
    g2_msg = transport.send(ALICE, BOB, 2, "x-indicator-shares",
                            tuple(g[key].at_2.value for key in order_x), share_bits_x)
    g3_msg = transport.send(ALICE, CHARLIE, 2, "x-indicator-shares",
                            tuple(g[key].at_3.value for key in order_x), share_bits_x)

    # bob deals indicator lines
    h = {}
    for j, i in enumerate(slots):
        for sy in ya.symbols:
            secret = field.element(1 if y_seq[i - 1] == sy else 0)
            h[(j, sy)] = degree1_share(
                secret, lambda k, j=j, sy=sy:
                sources[BOB].below(k, f"slope-y[{j}][{sy}]"))
    order_y = [(j, sy) for j in range(m) for sy in ya.symbols]
    share_bits_y = m * len(ya) * bpe
    h1_msg = transport.send(BOB, ALICE, 3, "y-indicator-shares",
                            tuple(h[key].at_1.value for key in order_y), share_bits_y)
    h3_msg = transport.send(BOB, CHARLIE, 3, "y-indicator-shares",
                            tuple(h[key].at_3.value for key in order_y), share_bits_y)

    def weighted_sample(g_vals: dict, h_vals: dict):
        acc = field.zero()
        for sx in xa.symbols:
            for sy in ya.symbols:
                inner = field.zero()
                for j in range(m):
                    inner = inner + g_vals[(j, sx)] * h_vals[(j, sy)]
                acc = acc + weights[(sx, sy)] * inner
        return acc

    # local evaluations at each party's abscissa
    f_at_1 = weighted_sample({k: t.at_1 for k, t in g.items()},
                             dict(zip(order_y, map(field.element, h1_msg.values))))
    f_at_2 = weighted_sample(dict(zip(order_x, map(field.element, g2_msg.values))),
                             {k: t.at_2 for k, t in h.items()})
    f_at_3 = weighted_sample(dict(zip(order_x, map(field.element, g3_msg.values))),
                             dict(zip(order_y, map(field.element, h3_msg.values))))

    fa_msg = transport.send(ALICE, CHARLIE, 4, "poly-sample", (f_at_1.value,), bpe)
    fb_msg = transport.send(BOB, CHARLIE, 4, "poly-sample", (f_at_2.value,), bpe)

    f_zero = interpolate_at_zero([
        (field.element(1), field.element(fa_msg.values[0])),
        (field.element(2), field.element(fb_msg.values[0])),
        (field.element(3), f_at_3),
    ])
    estimate = decode_centered(f_zero, d, m)
    views[CHARLIE].output = estimate
    params = RunParams("poly-l", n, m, field.modulus, seed, f1.name)
    return ProtocolResult("poly-l", estimate, views, transport.total_bits, params, idx)


# ----------------------------------------------------------------------
# protocol 'poly-direct': linear shares of the product-form factors


def run_protocol_poly_direct(f1: FunctionTable, x_seq, y_seq, m: int, seed=None, *,
                             field: PrimeField | None = None, sources=None,
                             index_set: IndexSet | None = None) -> ProtocolResult:
    """Estimate through linear sharing of per-slot product-form factors.

    Uses the table's product form (or the indicator fallback): for each
    sampled slot and term, alice deals a line through the scaled factor
    a_k(x_i) and bob through b_k(y_i).  Multiplying coordinate-wise and
    summing over slots and terms gives each party one evaluation of a
    degree-two polynomial whose constant term is the scaled sample sum;
    charlie interpolates it at zero from the three evaluations.
    """
    form = f1.effective_product_form()
    rank = len(form)
    if field is None:
        field = field_for_poly_direct(f1, m, form)
    _require_poly_field(field)
    d_a, d_b = _product_form_denominators(form)
    _require_capacity(field, int(f1.max_abs * d_a * d_b), m)
    n, sources, views, transport = _setup("poly-direct", f1, x_seq, y_seq, m,
                                          seed, sources)
    bpe = field.bits_per_element

    idx = distribute_index_set(transport, sources[ALICE], n, m, index_set)
    slots = idx.indices

    def encode_scaled(value: Fraction, denom: int):
        scaled = value * denom
        if scaled.denominator != 1:
            raise ProtocolInputError(
                f"product-form value {value} not cleared by denominator {denom}")
        return field.element(int(scaled) % field.modulus)

    # alice deals lines through her scaled factors
    a_shares = {}
    for j, i in enumerate(slots):
        for k, term in enumerate(form):
            secret = encode_scaled(term.a[x_seq[i - 1]], d_a)
            a_shares[(j, k)] = degree1_share(
                secret, lambda kk, j=j, k=k:
                sources[ALICE].below(kk, f"slope-a[{j}][{k}]"))
    order = [(j, k) for j in range(m) for k in range(rank)]
    share_bits = m * rank * bpe
    a2_msg = transport.send(ALICE, BOB, 2, "x-factor-shares",
                            tuple(a_shares[key].at_2.value for key in order),
                            share_bits)
    a3_msg = transport.send(ALICE, CHARLIE, 2, "x-factor-shares",
                            tuple(a_shares[key].at_3.value for key in order),
                            share_bits)

    # bob deals lines through his scaled factors
    b_shares = {}
    for j, i in enumerate(slots):
        for k, term in enumerate(form):
            secret = encode_scaled(term.b[y_seq[i - 1]], d_b)
            b_shares[(j, k)] = degree1_share(
                secret, lambda kk, j=j, k=k:
                sources[BOB].below(kk, f"slope-b[{j}][{k}]"))
    b1_msg = transport.send(BOB, ALICE, 3, "y-factor-shares",
                            tuple(b_shares[key].at_1.value for key in order),
                            share_bits)
    b3_msg = transport.send(BOB, CHARLIE, 3, "y-factor-shares",
                            tuple(b_shares[key].at_3.value for key in order),
                            share_bits)

    def product_sample(a_vals: dict, b_vals: dict):
        acc = field.zero()
        for key in order:
            acc = acc + a_vals[key] * b_vals[key]
        return acc

    f_at_1 = product_sample({k: t.at_1 for k, t in a_shares.items()},
                            dict(zip(order, map(field.element, b1_msg.values))))
    f_at_2 = product_sample(dict(zip(order, map(field.element, a2_msg.values))),
                            {k: t.at_2 for k, t in b_shares.items()})
    f_at_3 = product_sample(dict(zip(order, map(field.element, a3_msg.values))),
                            dict(zip(order, map(field.element, b3_msg.values))))

    fa_msg = transport.send(ALICE, CHARLIE, 4, "poly-sample", (f_at_1.value,), bpe)
    fb_msg = transport.send(BOB, CHARLIE, 4, "poly-sample", (f_at_2.value,), bpe)

    f_zero = interpolate_at_zero([
        (field.element(1), field.element(fa_msg.values[0])),
        (field.element(2), field.element(fb_msg.values[0])),
        (field.element(3), f_at_3),
    ])
    estimate = decode_centered(f_zero, d_a * d_b, m)
    views[CHARLIE].output = estimate
    params = RunParams("poly-direct", n, m, field.modulus, seed, f1.name, rank=rank)
    return ProtocolResult("poly-direct", estimate, views, transport.total_bits,
                          params, idx)


# ----------------------------------------------------------------------
# registry

_FIELD_RULES = {
    "otp": field_for_otp,
    "poly-l": field_for_poly,
    "poly-direct": lambda f1, m: field_for_poly_direct(f1, m),
}

PROTOCOL_RUNNERS = {
    "otp": run_protocol_otp,
    "poly-l": run_protocol_poly_l,
    "poly-direct": run_protocol_poly_direct,
}


def register_protocol(name: str, runner, field_rule=None) -> None:
    """Hook for extra protocol variants (test harnesses use this)."""
    PROTOCOL_RUNNERS[name] = runner
    _FIELD_RULES[name] = field_rule or field_for_otp


def get_protocol(name: str):
    try:
        return PROTOCOL_RUNNERS[name]
    except KeyError:
        raise ValueError(
            f"unknown protocol {name!r} (have {sorted(PROTOCOL_RUNNERS)})")


def default_field_for(name: str, f1: FunctionTable, m: int) -> PrimeField:
    get_protocol(name)
    return _FIELD_RULES[name](f1, m)
