"""Exact privacy audits by exhaustive enumeration of protocol randomness.

Every random draw a protocol makes is replaced by one coordinate of an
enumeration tape, so the exact distribution of each party's serialized
view is computed as rational weights, not estimated.  Verdicts are exact
equality of distributions: pass means worst total-variation distance is
exactly zero.  Instances too large to enumerate fail fast with the
required count; there is no approximate verdict.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .engine import (PARTIES, ALICE, BOB, CHARLIE, ProbeSource, TapeSource,
                     default_field_for, get_protocol)
from .functions import FunctionTable
from .sampling import IndexSet


class AuditBudgetError(RuntimeError):
    """The enumeration would exceed the configured budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"audit needs {required} enumeration steps, budget is {budget}; "
            f"shrink n, m, the alphabets, or the field")


@dataclass(frozen=True)
class AuditParams:
    """Instance description shared by all three audit definitions."""

    f1: FunctionTable
    n: int
    m: int
    field: object = None  # PrimeField or None for the protocol default
    budget: int = 10**8
    index_set: IndexSet | None = None  # fixed-locations diagnostic mode (weaker)


@dataclass
class PrivacyReport:
    protocol: str
    definition: str  # against-alice | against-bob | against-charlie
    n: int
    m: int
    modulus: int
    inputs_compared: int
    verdict: str  # pass | fail
    worst_distance: Fraction
    enumeration_size: int
    fixed_index_set: bool = False
    witness: str = ""

    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "definition": self.definition,
            "n": self.n,
            "m": self.m,
            "modulus": self.modulus,
            "inputs_compared": self.inputs_compared,
            "verdict": self.verdict,
            "worst_distance": str(self.worst_distance),
            "enumeration_size": self.enumeration_size,
            "fixed_index_set": self.fixed_index_set,
            "witness": self.witness,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def render_text(self) -> str:
        head = (f"{self.protocol:<12} {self.definition:<16} n={self.n} m={self.m} "
                f"p={self.modulus} inputs={self.inputs_compared} "
                f"enum={self.enumeration_size}")
        tail = f"{self.verdict.upper()} (worst TV distance {self.worst_distance})"
        note = " [fixed index set: weaker audit]" if self.fixed_index_set else ""
        wit = f"\n  witness: {self.witness}" if self.witness else ""
        return f"{head} -> {tail}{note}{wit}"


def _resolve_field(protocol: str, params: AuditParams):
    if params.field is not None:
        return params.field
    return default_field_for(protocol, params.f1, params.m)


def _probe_ranges(protocol: str, params: AuditParams, fld, x_seq, y_seq):
    """Dry-run the protocol to learn each party's draw ranges."""
    runner = get_protocol(protocol)
    probes = {p: ProbeSource() for p in PARTIES}
    runner(params.f1, x_seq, y_seq, params.m, field=fld, sources=probes,
           index_set=params.index_set)
    return {p: [size for _, size in probes[p].ranges] for p in PARTIES}


def _tape_space(ranges: dict) -> int:
    return prod(size for p in PARTIES for size in ranges[p])


def _view_distribution(protocol: str, params: AuditParams, fld, x_seq, y_seq,
                       ranges: dict, party: str, with_estimate: bool) -> dict:
    """Exact distribution of one party's serialized view over all tapes."""
    runner = get_protocol(protocol)
    sizes = [size for p in PARTIES for size in ranges[p]]
    cuts = []
    start = 0
    for p in PARTIES:
        cuts.append((p, start, start + len(ranges[p])))
        start += len(ranges[p])
    total = prod(sizes) if sizes else 1
    weight = Fraction(1, total)
    dist: dict = {}
    for combo in itertools.product(*(range(s) for s in sizes)):
        sources = {p: TapeSource(combo[a:b]) for p, a, b in cuts}
        result = runner(params.f1, x_seq, y_seq, params.m, field=fld,
                        sources=sources, index_set=params.index_set)
        for p, src in sources.items():
            if not src.exhausted:
                raise RuntimeError(f"unused tape draws for {p}; ranges are unstable")
        key = result.views[party].canonical()
        if with_estimate:
            key = (result.estimate, key)
        dist[key] = dist.get(key, Fraction(0)) + weight
    return dist


def tv_distance(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    gap = sum((abs(p.get(k, Fraction(0)) - q.get(k, Fraction(0))) for k in keys),
              Fraction(0))
    return gap / 2


def _check_budget(per_setting: int, settings: int, budget: int) -> None:
    required = per_setting * settings
    if required > budget:
        raise AuditBudgetError(required, budget)


def _one_sided_audit(protocol: str, definition: str, party: str,
                     fixed_seq, variants, params: AuditParams,
                     fixed_is_x: bool) -> PrivacyReport:
    fld = _resolve_field(protocol, params)
    variants = [tuple(v) for v in variants]
    if not variants:
        raise ValueError("no variant sequences to compare")

    def pair(v):
        return (tuple(fixed_seq), v) if fixed_is_x else (v, tuple(fixed_seq))

    ranges = _probe_ranges(protocol, params, fld, *pair(variants[0]))
    per_setting = _tape_space(ranges)
    _check_budget(per_setting, len(variants), params.budget)

    worst = Fraction(0)
    witness = ""
    base = None
    for v in variants:
        x_seq, y_seq = pair(v)
        dist = _view_distribution(protocol, params, fld, x_seq, y_seq, ranges,
                                  party, with_estimate=False)
        if base is None:
            base_variant, base = v, dist
            continue
        d = tv_distance(base, dist)
        if d > worst:
            worst = d
            witness = f"variants {base_variant} vs {v}"
    return PrivacyReport(
        protocol=protocol,
        definition=definition,
        n=params.n,
        m=params.m,
        modulus=fld.modulus,
        inputs_compared=len(variants),
        verdict="pass" if worst == 0 else "fail",
        worst_distance=worst,
        enumeration_size=per_setting * len(variants),
        fixed_index_set=params.index_set is not None,
        witness=witness,
    )


def audit_privacy_alice(protocol: str, x_fixed, y_variants,
                        params: AuditParams) -> PrivacyReport:
    """Alice's view distribution must not move when only y changes."""
    return _one_sided_audit(protocol, "against-alice", ALICE, x_fixed,
                            y_variants, params, fixed_is_x=True)


def audit_privacy_bob(protocol: str, y_fixed, x_variants,
                      params: AuditParams) -> PrivacyReport:
    """Bob's view distribution must not move when only x changes."""
    return _one_sided_audit(protocol, "against-bob", BOB, y_fixed,
                            x_variants, params, fixed_is_x=False)


def audit_privacy_charlie(protocol: str, input_pairs,
                          params: AuditParams) -> PrivacyReport:
    """Charlie's view given the estimate must not depend on the inputs.

    For each input pair the joint distribution of (estimate, view) is
    enumerated; for every estimate value two input pairs both support,
    the conditional view distributions must agree exactly.  Estimates
    outside a pair's support impose no constraint.
    """
    fld = _resolve_field(protocol, params)
    pairs = [(tuple(x), tuple(y)) for x, y in input_pairs]
    if not pairs:
        raise ValueError("no input pairs to compare")
    ranges = _probe_ranges(protocol, params, fld, *pairs[0])
    per_setting = _tape_space(ranges)
    _check_budget(per_setting, len(pairs), params.budget)

    joints = []
    for x_seq, y_seq in pairs:
        joint = _view_distribution(protocol, params, fld, x_seq, y_seq, ranges,
                                   CHARLIE, with_estimate=True)
        marginal: dict = {}
        for (est, _), w in joint.items():
            marginal[est] = marginal.get(est, Fraction(0)) + w
        conditionals: dict = {}
        for (est, view), w in joint.items():
            conditionals.setdefault(est, {})[view] = w / marginal[est]
        joints.append(((x_seq, y_seq), conditionals))

    worst = Fraction(0)
    witness = ""
    for i in range(len(joints)):
        for j in range(i + 1, len(joints)):
            (pair_i, cond_i), (pair_j, cond_j) = joints[i], joints[j]
            for est in set(cond_i) & set(cond_j):
                d = tv_distance(cond_i[est], cond_j[est])
                if d > worst:
                    worst = d
                    witness = (f"inputs {pair_i} vs {pair_j} "
                               f"conditioned on estimate {est}")
    return PrivacyReport(
        protocol=protocol,
        definition="against-charlie",
        n=params.n,
        m=params.m,
        modulus=fld.modulus,
        inputs_compared=len(pairs),
        verdict="pass" if worst == 0 else "fail",
        worst_distance=worst,
        enumeration_size=per_setting * len(pairs),
        fixed_index_set=params.index_set is not None,
        witness=witness,
    )


def all_sequences(alphabet, n: int):
    """Every length-n sequence over the alphabet, lexicographic."""
    return [tuple(s) for s in itertools.product(alphabet.symbols, repeat=n)]


def audit_protocol(protocol: str, params: AuditParams) -> list[PrivacyReport]:
    """Run all three definitions over all input pairs of the instance."""
    xs = all_sequences(params.f1.x_alphabet, params.n)
    ys = all_sequences(params.f1.y_alphabet, params.n)
    reports = []
    for x_fixed in xs:
        reports.append(audit_privacy_alice(protocol, x_fixed, ys, params))
    for y_fixed in ys:
        reports.append(audit_privacy_bob(protocol, y_fixed, xs, params))
    reports.append(audit_privacy_charlie(
        protocol, [(x, y) for x in xs for y in ys], params))
    return reports
