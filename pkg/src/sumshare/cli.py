"""Command-line front end: run, audit, distortion, comm-cost.

Every command is a deterministic function of its resolved configuration;
the configuration is echoed for provenance.  Flags override values from
an optional ``key=value`` config file.  Exit codes: 0 success or pass,
1 verification failure (a failed audit or a violated bound), 2 config or
resource errors (bad flags, parse errors, exceeded budgets).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .audit import AuditBudgetError, AuditParams, audit_protocol
from .engine import default_field_for, get_protocol
from .experiments import (comm_csv, comm_json, comm_report, distortion_csv,
                          distortion_experiment, distortion_json,
                          resolve_m_rule)
from .field import PrimeField
from .functions import (OutOfAlphabetError, TableFormatError, builtin_table,
                        eval_sum_type, resolve_table)
from .sampling import DistortionBoundError, EnumerationBudgetError, IndexSet
from .sequences import GENERATOR_NAMES, GENERATOR_VERSION, generate_pair

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2


class CliError(Exception):
    """Configuration or input problem; maps to exit code 2."""


def _read_config_file(path: str) -> dict:
    settings = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CliError(f"{path}:{line_no}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                settings[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}")
    return settings


def _merge_config(args: argparse.Namespace) -> dict:
    """Start from the config file, let explicit flags win."""
    merged = {}
    if getattr(args, "config", None):
        merged.update(_read_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("config", "func", "command"):
            continue
        if value is not None:
            merged[key] = value
    return merged


def _echo_config(cfg: dict, command: str, stream) -> None:
    parts = " ".join(f"{k.replace('_', '-')}={cfg[k]}" for k in sorted(cfg))
    print(f"config: command={command} {parts}", file=stream)


def _get(cfg: dict, key: str, default=None):
    return cfg.get(key, default)


def _require(cfg: dict, key: str):
    value = cfg.get(key)
    if value is None:
        raise CliError(f"missing required setting --{key.replace('_', '-')}")
    return value


def _as_int(value, what: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise CliError(f"{what} must be an integer, got {value!r}")


def _as_int_list(value, what: str) -> list[int]:
    text = str(value).strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise CliError(f"{what} must be comma-separated integers, got {value!r}")


def _as_bool(value, what: str) -> bool:
    if isinstance(value, bool):
        return value
    if str(value).lower() in ("true", "1", "yes"):
        return True
    if str(value).lower() in ("false", "0", "no"):
        return False
    raise CliError(f"{what} must be true or false, got {value!r}")


def _load_symbols(path: str, alphabet, what: str):
    """One symbol per whitespace-separated token; errors carry line numbers."""
    symbols = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                for tok in line.split():
                    if tok not in alphabet:
                        raise CliError(
                            f"{path}:{line_no}: symbol {tok!r} not in the "
                            f"{what} alphabet {list(alphabet.symbols)}")
                    symbols.append(tok)
    except OSError as exc:
        raise CliError(f"cannot read {what} sequence: {exc}")
    if not symbols:
        raise CliError(f"{what} sequence file {path} is empty")
    return tuple(symbols)


def _resolve_f1(cfg: dict):
    table_ref = _get(cfg, "f1", "hamming")
    sizes = _get(cfg, "alphabets")
    try:
        if sizes is not None:
            sx, sy = (_as_int(s, "alphabet size") for s in str(sizes).split(","))
            if sx != sy:
                raise CliError(
                    "builtin tables need equal alphabet sizes; "
                    f"got {sx},{sy} (load a table file for uneven grids)")
            return resolve_table(str(table_ref), size=sx)
        return resolve_table(str(table_ref))
    except TableFormatError as exc:
        raise CliError(f"bad table file: {exc}")
    except (OSError, ValueError) as exc:
        raise CliError(str(exc))


def _resolve_field(cfg: dict):
    size = _get(cfg, "field_size")
    if size is None:
        return None
    try:
        return PrimeField(_as_int(size, "field size"))
    except ValueError as exc:
        raise CliError(str(exc))


def _resolve_sequences(cfg: dict, f1, seed):
    x_path, y_path = _get(cfg, "x"), _get(cfg, "y")
    gen = _get(cfg, "gen")
    if gen is not None and (x_path or y_path):
        raise CliError("give either --x/--y files or --gen, not both")
    if gen is not None:
        n = _as_int(_require(cfg, "n"), "n")
        gen_seed = _get(cfg, "gen_seed", seed)
        try:
            return generate_pair(str(gen), n, f1.x_alphabet, f1.y_alphabet,
                                 seed=gen_seed)
        except ValueError as exc:
            raise CliError(str(exc))
    if not (x_path and y_path):
        raise CliError("sequences required: --x and --y files, or --gen with --n")
    xs = _load_symbols(str(x_path), f1.x_alphabet, "x")
    ys = _load_symbols(str(y_path), f1.y_alphabet, "y")
    if len(xs) != len(ys):
        raise CliError(f"sequence lengths differ: {len(xs)} vs {len(ys)}")
    return xs, ys


def _write_file(path: str, content: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}")


# ----------------------------------------------------------------------
# commands


def cmd_run(cfg: dict) -> int:
    protocol = str(_get(cfg, "protocol", "otp"))
    seed = _require(cfg, "seed")
    f1 = _resolve_f1(cfg)
    xs, ys = _resolve_sequences(cfg, f1, seed)
    n = len(xs)
    m_raw = str(_require(cfg, "m"))
    m = n if m_raw == "equal-n" else _as_int(m_raw, "m")
    if not 1 <= m <= n:
        raise CliError(f"m must be in 1..{n}, got {m}")
    fld = _resolve_field(cfg)
    runner = get_protocol(protocol)
    result = runner(f1, xs, ys, m, seed=seed, field=fld)
    truth = eval_sum_type(f1, xs, ys)
    err = abs(result.estimate - truth)

    _echo_config(cfg, "run", sys.stdout)
    print(f"protocol: {protocol}")
    print(f"n: {n}")
    print(f"m: {m}")
    print(f"seed: {seed}")
    print(f"field: p={result.params.modulus} "
          f"({PrimeField(result.params.modulus).bits_per_element} bits/element)")
    print(f"estimate: {result.estimate}")
    print(f"true-value: {truth}")
    print(f"abs-error: {err}")
    print(f"bits: {result.total_bits}")
    print(f"rate: {result.rate} ({float(result.rate):.6f})")

    if _get(cfg, "transcript"):
        _write_file(str(cfg["transcript"]), result.transcript())
    if _get(cfg, "json"):
        blob = {
            "config": {k: str(v) for k, v in sorted(cfg.items())},
            "protocol": protocol,
            "n": n,
            "m": m,
            "modulus": result.params.modulus,
            "index_set": list(result.index_set.indices),
            "estimate": str(result.estimate),
            "true_value": str(truth),
            "abs_error": str(err),
            "bits": result.total_bits,
            "rate": repr(float(result.rate)),
        }
        _write_file(str(cfg["json"]), json.dumps(blob, indent=2) + "\n")
    return EXIT_OK


def cmd_audit(cfg: dict) -> int:
    protocol = str(_get(cfg, "protocol", "otp"))
    n = _as_int(_get(cfg, "n", 2), "n")
    m = _as_int(_get(cfg, "m", 1), "m")
    if not 1 <= m <= n:
        raise CliError(f"m must be in 1..{n}, got {m}")
    f1 = _resolve_f1(cfg)
    budget = _as_int(_get(cfg, "budget", 10**8), "budget")
    if budget <= 0:
        raise CliError("budget must be positive")
    fixed = _get(cfg, "fixed_indices")
    index_set = None
    if fixed is not None:
        indices = _as_int_list(fixed, "fixed indices")
        try:
            index_set = IndexSet(tuple(indices), n)
        except ValueError as exc:
            raise CliError(str(exc))
        if index_set.m != m:
            raise CliError(f"fixed indices give m={index_set.m}, expected {m}")
    params = AuditParams(f1=f1, n=n, m=m, field=_resolve_field(cfg),
                         budget=budget, index_set=index_set)

    _echo_config(cfg, "audit", sys.stderr)
    reports = audit_protocol(protocol, params)
    for report in reports:
        print(report.render_text())
    worst = max((r.worst_distance for r in reports), default=Fraction(0))
    failed = [r for r in reports if not r.passed()]
    print(f"summary: {len(reports) - len(failed)}/{len(reports)} definitions pass, "
          f"worst TV distance {worst}")
    if _get(cfg, "json"):
        _write_file(str(cfg["json"]), json.dumps(
            [r.to_json_dict() for r in reports], indent=2) + "\n")
    return EXIT_VERIFICATION if failed else EXIT_OK


def cmd_distortion(cfg: dict) -> int:
    f1 = _resolve_f1(cfg)
    n_list = _as_int_list(_get(cfg, "n", ""), "n")
    m_list = _as_int_list(_get(cfg, "m", ""), "m")
    mode = str(_get(cfg, "mode", "exhaustive")).replace("-", "_")
    protocol = str(_get(cfg, "protocol", "otp"))
    seed = _as_int(_get(cfg, "seed", 0), "seed")
    trials = _as_int(_get(cfg, "trials", 10_000), "trials")
    workers = _as_int(_get(cfg, "workers", 1), "workers")
    subset_budget = _as_int(_get(cfg, "subset_budget", 10**6), "subset budget")
    pair_budget = _as_int(_get(cfg, "pair_budget", 10**6), "pair budget")
    if min(subset_budget, pair_budget) <= 0:
        raise CliError("budgets must be positive")

    _echo_config(cfg, "distortion", sys.stderr)
    reports = distortion_experiment(
        f1, n_list, m_list, mode, protocol=protocol, seed=seed, trials=trials,
        subset_budget=subset_budget, pair_budget=pair_budget, workers=workers)
    csv_text = distortion_csv(reports)
    if _get(cfg, "out"):
        _write_file(str(cfg["out"]), csv_text)
    else:
        sys.stdout.write(csv_text)
    if _get(cfg, "json"):
        _write_file(str(cfg["json"]), distortion_json(reports) + "\n")
    return EXIT_OK


def cmd_comm_cost(cfg: dict) -> int:
    protocol = str(_get(cfg, "protocol", "poly-l"))
    f1 = _resolve_f1(cfg)
    n_list = _as_int_list(_get(cfg, "n", ""), "n")
    rule_raw = str(_get(cfg, "m_rule", "sqrt"))
    if rule_raw == "sqrt":
        rule = ("sqrt",)
    elif rule_raw.startswith("fixed:"):
        rule = ("fixed", _as_int(rule_raw.split(":", 1)[1], "fixed m"))
    elif rule_raw == "custom":
        rule = ("custom", _as_int_list(_require(cfg, "m"), "m"))
    else:
        raise CliError(f"unknown m rule {rule_raw!r} (sqrt, fixed:K, custom)")
    verify = _as_bool(_get(cfg, "verify", True), "verify")
    seed = _as_int(_get(cfg, "seed", 0), "seed")

    _echo_config(cfg, "comm-cost", sys.stderr)
    try:
        rows = comm_report(protocol, n_list, rule, f1,
                           field=_resolve_field(cfg), verify=verify, seed=seed)
    except AssertionError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    csv_text = comm_csv(rows)
    if _get(cfg, "out"):
        _write_file(str(cfg["out"]), csv_text)
    else:
        sys.stdout.write(csv_text)
    if _get(cfg, "json"):
        _write_file(str(cfg["json"]), comm_json(rows) + "\n")
    return EXIT_OK


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumshare",
        description="Secure three-party subsampled estimation of normalized "
                    "sum-type functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--f1", help="builtin table name (hamming, equality, "
                                    "squared-difference, product; name:size) "
                                    "or a table file path")
        p.add_argument("--alphabets", help="alphabet sizes for builtins, e.g. 2,2")
        p.add_argument("--field-size", dest="field_size",
                       help="pin the field modulus instead of auto-sizing")
        p.add_argument("--json", help="also write a JSON report to this path")

    p_run = sub.add_parser("run", help="execute one protocol run")
    common(p_run)
    p_run.add_argument("--protocol", choices=None,
                       help="otp, poly-l, or poly-direct (default otp)")
    p_run.add_argument("--x", help="x sequence file, one symbol per token")
    p_run.add_argument("--y", help="y sequence file, one symbol per token")
    p_run.add_argument("--gen", help=f"builtin sequence generator "
                                     f"({', '.join(GENERATOR_NAMES)}) "
                                     f"v{GENERATOR_VERSION}, needs --n")
    p_run.add_argument("--gen-seed", dest="gen_seed",
                       help="generator seed (defaults to --seed)")
    p_run.add_argument("--n", help="sequence length when using --gen")
    p_run.add_argument("--m", help="sample count, or equal-n")
    p_run.add_argument("--seed", help="run seed (required; no silent entropy)")
    p_run.add_argument("--transcript", help="write the message transcript here")
    p_run.set_defaults(func=cmd_run)

    p_audit = sub.add_parser("audit", help="exhaustive privacy audit of a "
                                           "tiny instance")
    common(p_audit)
    p_audit.add_argument("--protocol", help="protocol to audit (default otp)")
    p_audit.add_argument("--n", help="sequence length (default 2)")
    p_audit.add_argument("--m", help="sample count (default 1)")
    p_audit.add_argument("--budget", help="max enumeration steps (default 1e8)")
    p_audit.add_argument("--fixed-indices", dest="fixed_indices",
                         help="audit conditioned on fixed sample locations "
                              "(weaker diagnostic mode)")
    p_audit.set_defaults(func=cmd_audit)

    p_dist = sub.add_parser("distortion", help="worst-case error sweep")
    common(p_dist)
    p_dist.add_argument("--protocol", help="protocol whose rate is reported")
    p_dist.add_argument("--n", help="comma list of sequence lengths")
    p_dist.add_argument("--m", help="comma list of sample counts")
    p_dist.add_argument("--mode", help="exhaustive or monte-carlo")
    p_dist.add_argument("--seed", help="sweep seed (default 0)")
    p_dist.add_argument("--trials", help="subsample trials per candidate pair")
    p_dist.add_argument("--workers", help="parallel workers (default 1)")
    p_dist.add_argument("--subset-budget", dest="subset_budget",
                        help="max subsets to enumerate per pair")
    p_dist.add_argument("--pair-budget", dest="pair_budget",
                        help="max sequence pairs in exhaustive mode")
    p_dist.add_argument("--out", help="CSV output path (default stdout)")
    p_dist.set_defaults(func=cmd_distortion)

    p_comm = sub.add_parser("comm-cost", help="communication cost table")
    common(p_comm)
    p_comm.add_argument("--protocol", help="protocol to cost (default poly-l)")
    p_comm.add_argument("--n", help="comma list of sequence lengths")
    p_comm.add_argument("--m-rule", dest="m_rule",
                        help="sqrt, fixed:K, or custom (with --m)")
    p_comm.add_argument("--m", help="explicit m list for --m-rule custom")
    p_comm.add_argument("--seed", help="seed for verification runs")
    p_comm.add_argument("--verify", help="reconcile with live runs (default true)")
    p_comm.add_argument("--out", help="CSV output path (default stdout)")
    p_comm.set_defaults(func=cmd_comm_cost)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        return args.func(cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AuditBudgetError, EnumerationBudgetError) as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DistortionBoundError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (OutOfAlphabetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
