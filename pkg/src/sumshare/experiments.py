"""Distortion sweeps and communication-cost tables.

Distortion rows pair a measured (or exactly enumerated) worst-case error
with the l2/sqrt(m) ceiling and the realized transmission rate of an
actual protocol run.  Cost rows reconcile the closed-form bit counts with
the live bit meter.  Both render to CSV, JSON, and aligned text.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .engine import default_field_for, get_protocol
from .field import PrimeField, ceil_log2
from .functions import FunctionTable
from .sampling import worst_case_distortion
from .sequences import generate_pair


@dataclass(frozen=True)
class DistortionReport:
    f1_name: str
    n: int
    m: int
    method: str
    distortion: object  # Fraction when exhaustive, float when sampled
    bound: float
    rate: Fraction
    protocol: str
    seed: int
    trials: int | None
    x_argmax: tuple
    y_argmax: tuple

    def to_json_dict(self) -> dict:
        return {
            "f1": self.f1_name,
            "n": self.n,
            "m": self.m,
            "method": self.method,
            "e_n": str(self.distortion) if isinstance(self.distortion, Fraction)
                   else repr(self.distortion),
            "bound": repr(self.bound),
            "rate": repr(float(self.rate)),
            "protocol": self.protocol,
            "seed": self.seed,
            "trials": self.trials,
            "x_argmax": list(self.x_argmax),
            "y_argmax": list(self.y_argmax),
        }


@dataclass(frozen=True)
class CommRow:
    n: int
    m: int
    bits: int
    rate: Fraction


def closed_form_bits(protocol: str, n: int, m: int, f1: FunctionTable,
                     field: PrimeField) -> int:
    """Total transmitted bits predicted for one run, index transfer included."""
    b = field.bits_per_element
    lx, ly = len(f1.x_alphabet), len(f1.y_alphabet)
    index_bits = m * ceil_log2(n)
    if protocol == "otp":
        extra = 2 * m * (ceil_log2(lx) + ceil_log2(ly) + lx * ly * b) + 3 * b
    elif protocol == "poly-l":
        extra = (2 * m * (lx + ly) + 2) * b
    elif protocol == "poly-direct":
        rank = len(f1.effective_product_form())
        extra = (4 * m * rank + 2) * b
    else:
        raise ValueError(f"no closed form for protocol {protocol!r}")
    return index_bits + extra


def _run_rate(protocol: str, f1: FunctionTable, x_seq, y_seq, m: int,
              seed: int) -> Fraction:
    runner = get_protocol(protocol)
    return runner(f1, x_seq, y_seq, m, seed=seed).rate


def _distortion_cell(args) -> DistortionReport:
    (f1, n, m, mode, protocol, seed, trials, subset_budget, pair_budget) = args
    cell_seed = f"{seed}:{n}:{m}"
    wc = worst_case_distortion(f1, n, m, mode, trials=trials, seed=cell_seed,
                               subset_budget=subset_budget,
                               pair_budget=pair_budget)
    rate = _run_rate(protocol, f1, wc.x_seq, wc.y_seq, m, seed)
    return DistortionReport(
        f1_name=f1.name,
        n=n,
        m=m,
        method=wc.method,
        distortion=wc.distortion,
        bound=f1.l2_norm() / math.sqrt(m),
        rate=rate,
        protocol=protocol,
        seed=seed,
        trials=wc.trials,
        x_argmax=wc.x_seq,
        y_argmax=wc.y_seq,
    )


def distortion_experiment(f1: FunctionTable, n_list, m_list,
                          mode: str = "exhaustive", *, protocol: str = "otp",
                          seed: int = 0, trials: int = 10_000,
                          subset_budget: int = 10**6,
                          pair_budget: int = 10**6,
                          workers: int = 1) -> list[DistortionReport]:
    """One report per (n, m) cell, rows ordered by cell key.

    Cells are independent; with workers > 1 they fan out to a process
    pool, each cell deriving its own seed, so the output is identical
    regardless of scheduling.
    """
    cells = sorted((n, m) for n in n_list for m in m_list if m <= n)
    jobs = [(f1, n, m, mode, protocol, seed, trials, subset_budget, pair_budget)
            for n, m in cells]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_distortion_cell, jobs))
    return [_distortion_cell(job) for job in jobs]


def resolve_m_rule(rule, n_list) -> list[tuple[int, int]]:
    """Expand an m rule into (n, m) pairs.

    Rules: ("sqrt",) takes m = ceil(sqrt(n)); ("fixed", k) uses k
    everywhere; ("custom", [m...]) zips explicit values with n_list.
    """
    kind = rule[0]
    if kind == "sqrt":
        return [(n, math.isqrt(n - 1) + 1 if n > 1 else 1) for n in n_list]
    if kind == "fixed":
        return [(n, rule[1]) for n in n_list]
    if kind == "custom":
        if len(rule[1]) != len(n_list):
            raise ValueError(
                f"custom m list has {len(rule[1])} entries for {len(n_list)} n values")
        return list(zip(n_list, rule[1]))
    raise ValueError(f"unknown m rule {rule!r}")


def comm_report(protocol: str, n_list, m_rule, f1: FunctionTable, *,
                field: PrimeField | None = None, verify: bool = True,
                seed: int = 0) -> list[CommRow]:
    """Closed-form cost table, reconciled with live runs when verify is set.

    Each row's bit count comes from the closed form at that cell's field
    (the protocol default for (f1, m) unless one is pinned); with verify,
    the protocol actually runs once per cell and the meter must agree
    exactly.
    """
    rows = []
    for n, m in resolve_m_rule(m_rule, n_list):
        if not 1 <= m <= n:
            raise ValueError(f"m rule gave m={m} outside 1..{n}")
        fld = field if field is not None else default_field_for(protocol, f1, m)
        bits = closed_form_bits(protocol, n, m, f1, fld)
        if verify:
            xs, ys = generate_pair("periodic", n, f1.x_alphabet, f1.y_alphabet)
            result = get_protocol(protocol)(f1, xs, ys, m, seed=seed, field=fld)
            if result.total_bits != bits:
                raise AssertionError(
                    f"metered bits {result.total_bits} disagree with closed form "
                    f"{bits} at (n={n}, m={m}, p={fld.modulus})")
        rows.append(CommRow(n=n, m=m, bits=bits, rate=Fraction(bits, n)))
    return rows


# ----------------------------------------------------------------------
# rendering


def distortion_csv(reports) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "m", "e_n", "bound", "R", "protocol", "method",
                     "seed", "trials"])
    for r in reports:
        e_n = str(r.distortion) if isinstance(r.distortion, Fraction) \
            else repr(r.distortion)
        writer.writerow([r.n, r.m, e_n, repr(r.bound), repr(float(r.rate)),
                         r.protocol, r.method, r.seed,
                         "" if r.trials is None else r.trials])
    return out.getvalue()


def comm_csv(rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "m", "k", "R"])
    for r in rows:
        writer.writerow([r.n, r.m, r.bits, repr(float(r.rate))])
    return out.getvalue()


def distortion_json(reports) -> str:
    return json.dumps([r.to_json_dict() for r in reports], indent=2)


def comm_json(rows) -> str:
    return json.dumps([{"n": r.n, "m": r.m, "k": r.bits,
                        "R": repr(float(r.rate))} for r in rows], indent=2)


def distortion_text(reports) -> str:
    header = f"{'n':>8} {'m':>6} {'e_n':>14} {'bound':>12} {'R':>12} method"
    lines = [header]
    for r in reports:
        e_n = str(r.distortion) if isinstance(r.distortion, Fraction) \
            else f"{r.distortion:.6f}"
        lines.append(f"{r.n:>8} {r.m:>6} {e_n:>14} {r.bound:>12.6f} "
                     f"{float(r.rate):>12.6f} {r.method}")
    return "\n".join(lines)


def comm_text(rows) -> str:
    header = f"{'n':>8} {'m':>6} {'k':>12} {'R':>12}"
    lines = [header]
    for r in rows:
        lines.append(f"{r.n:>8} {r.m:>6} {r.bits:>12} {float(r.rate):>12.6f}")
    return "\n".join(lines)
