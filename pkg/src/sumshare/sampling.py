"""Random subsampling without replacement and its exact error analysis.

Everything statistical here is exact: estimates, moments, and expected
absolute errors are Fractions wherever enumeration is feasible, with
seeded Monte Carlo only where an instance is too large to enumerate.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .functions import FunctionTable, check_sequences, eval_sum_type
from .sequences import generate_pair


class EnumerationBudgetError(RuntimeError):
    """An exhaustive computation would exceed its configured budget."""

    def __init__(self, required: int, budget: int, what: str):
        self.required = required
        self.budget = budget
        super().__init__(f"{what} needs {required} steps, budget is {budget}")


class DistortionBoundError(AssertionError):
    """A measured distortion exceeded the proven ceiling; this is a finding."""


@dataclass(frozen=True)
class IndexSet:
    """m distinct 1-based positions drawn from {1..n}."""

    indices: tuple
    n: int

    def __post_init__(self):
        idx = tuple(sorted(self.indices))
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise ValueError("index set must be nonempty")
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate indices in {idx}")
        if idx[0] < 1 or idx[-1] > self.n:
            raise ValueError(f"indices {idx} out of range 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.indices)


def fisher_yates_subset(n: int, m: int, draw_below) -> tuple:
    """Uniform m-subset of {1..n} via a partial shuffle.

    ``draw_below(k)`` must return a uniform integer in [0, k).  Each of
    the n!/(n-m)! draw tapes yields one ordered arrangement, so every
    m-subset comes out with probability 1/C(n, m).
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    arr = list(range(1, n + 1))
    for i in range(m):
        j = i + draw_below(n - i)
        arr[i], arr[j] = arr[j], arr[i]
    return tuple(arr[:m])


def sample_indices(n: int, m: int, rng: random.Random) -> IndexSet:
    """Draw m locations uniformly without replacement from {1..n}."""
    return IndexSet(fisher_yates_subset(n, m, rng.randrange), n)


@dataclass(frozen=True)
class JointTypeEstimate:
    """Pair counts over the sampled positions and the induced distribution."""

    counts: dict
    m: int

    def __post_init__(self):
        total = sum(self.counts.values())
        if total != self.m:
            raise ValueError(f"counts sum to {total}, expected {self.m}")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative count")

    def probability(self, x, y) -> Fraction:
        return Fraction(self.counts.get((x, y), 0), self.m)

    @property
    def probabilities(self) -> dict:
        return {k: Fraction(c, self.m) for k, c in self.counts.items()}


def partial_frequency(x_seq, y_seq, index_set: IndexSet) -> JointTypeEstimate:
    """Count sampled (x, y) pairs; the estimated joint type is counts/m."""
    n = len(x_seq)
    if len(y_seq) != n:
        raise ValueError("sequence lengths differ")
    if index_set.n != n:
        raise ValueError(f"index set drawn for n={index_set.n}, sequences have n={n}")
    counts: dict = {}
    for i in index_set.indices:
        pair = (x_seq[i - 1], y_seq[i - 1])
        counts[pair] = counts.get(pair, 0) + 1
    return JointTypeEstimate(counts, index_set.m)


def full_frequency(x_seq, y_seq) -> dict:
    """Pair counts over the whole sequences (the deterministic histogram)."""
    counts: dict = {}
    for pair in zip(x_seq, y_seq):
        counts[pair] = counts.get(pair, 0) + 1
    return counts


def estimate_function(f1: FunctionTable, x_seq, y_seq, index_set: IndexSet) -> Fraction:
    """The subsample estimate: (1/m) * sum over sampled positions of f1.

    This is the plaintext value every protocol must reproduce exactly.
    Debug builds cross-check the count-weighted expansion of the same sum.
    """
    check_sequences(f1, x_seq, y_seq)
    direct = sum(
        (f1.value(x_seq[i - 1], y_seq[i - 1]) for i in index_set.indices), Fraction(0)
    ) / index_set.m
    if __debug__:
        est = partial_frequency(x_seq, y_seq, index_set)
        weighted = sum(
            (f1.value(x, y) * Fraction(c, est.m) for (x, y), c in est.counts.items()),
            Fraction(0),
        )
        assert weighted == direct, "count-weighted expansion disagrees with direct sum"
    return direct


def hypergeometric_stats(n: int, m: int, n_xy: int) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of the estimated probability of one cell.

    The sampled count of a cell with full count N is hypergeometric, so
    the cell estimate count/m has mean N/n and variance
    N(n-N)(n-m) / (m n^2 (n-1)), taken as 0 when n = 1.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if not 0 <= n_xy <= n:
        raise ValueError(f"cell count {n_xy} out of range 0..{n}")
    mean = Fraction(n_xy, n)
    if n == 1:
        return mean, Fraction(0)
    var = Fraction(n_xy * (n - n_xy) * (n - m), m * n * n * (n - 1))
    return mean, var


def hypergeometric_pmf(n: int, successes: int, m: int, k: int) -> Fraction:
    """P[k successes in an m-sample without replacement], exactly."""
    if k < 0 or k > m or k > successes or m - k > n - successes:
        return Fraction(0)
    return Fraction(
        math.comb(successes, k) * math.comb(n - successes, m - k), math.comb(n, m)
    )


def mse_and_l2_bounds(n: int, m: int, frequencies: dict) -> tuple[Fraction, float]:
    """Summed per-cell variance of the type estimate, and its square root.

    Checks the closed-form ceiling: the sum never exceeds 1/m.
    """
    total_count = sum(frequencies.values())
    if total_count != n:
        raise ValueError(f"frequencies sum to {total_count}, expected n={n}")
    sigma = sum(
        (hypergeometric_stats(n, m, c)[1] for c in frequencies.values()), Fraction(0)
    )
    if sigma > Fraction(1, m):
        raise DistortionBoundError(f"summed MSE {sigma} exceeds 1/m = 1/{m}")
    return sigma, math.sqrt(sigma)


def enumerate_type_moments(n: int, m: int, n_xy: int) -> tuple[Fraction, Fraction]:
    """Brute-force mean and variance of a cell estimate over all C(n, m) subsets.

    Independent of the closed form: lays out a 0/1 sequence with n_xy
    ones and enumerates every subset.
    """
    marks = [1] * n_xy + [0] * (n - n_xy)
    count = 0
    sum_l = 0
    sum_l2 = 0
    for subset in itertools.combinations(range(n), m):
        l = sum(marks[i] for i in subset)
        count += 1
        sum_l += l
        sum_l2 += l * l
    mean = Fraction(sum_l, count * m)
    second = Fraction(sum_l2, count * m * m)
    return mean, second - mean * mean


def _subset_count_within(n: int, m: int, budget: int, what: str) -> int:
    c = math.comb(n, m)
    if c > budget:
        raise EnumerationBudgetError(c, budget, what)
    return c


def _expected_abs_error_from_values(values, m: int, subset_budget: int) -> Fraction:
    """E|subsample mean - full mean| by enumerating every m-subset."""
    n = len(values)
    count = _subset_count_within(n, m, subset_budget, "subset enumeration")
    f_n = sum(values, Fraction(0)) / n
    total = Fraction(0)
    for subset in itertools.combinations(range(n), m):
        sample_mean = sum((values[i] for i in subset), Fraction(0)) / m
        total += abs(sample_mean - f_n)
    return total / count


def exact_expected_abs_error(f1: FunctionTable, x_seq, y_seq, m: int,
                             subset_budget: int = 10**6) -> Fraction:
    """Exact expected absolute estimation error for one sequence pair."""
    n = check_sequences(f1, x_seq, y_seq)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    values = tuple(f1.value(x, y) for x, y in zip(x_seq, y_seq))
    return _expected_abs_error_from_values(values, m, subset_budget)


def exact_expected_abs_error_two_valued(n: int, m: int, count_hi: int,
                                        value_lo: Fraction,
                                        value_hi: Fraction) -> Fraction:
    """Exact expected absolute error when positions take only two values.

    With count_hi positions at value_hi and the rest at value_lo, the
    sampled count of high positions is hypergeometric, which closes the
    expectation without enumerating subsets.  Usable at any n.
    """
    value_lo = Fraction(value_lo)
    value_hi = Fraction(value_hi)
    f_n = (value_lo * (n - count_hi) + value_hi * count_hi) / n
    total = Fraction(0)
    for k in range(max(0, m - (n - count_hi)), min(m, count_hi) + 1):
        sample_mean = (value_lo * (m - k) + value_hi * k) / m
        total += hypergeometric_pmf(n, count_hi, m, k) * abs(sample_mean - f_n)
    return total


def sampled_expected_abs_error(f1: FunctionTable, x_seq, y_seq, m: int,
                               trials: int, rng: random.Random) -> Fraction:
    """Empirical mean absolute error over seeded random subsamples."""
    n = check_sequences(f1, x_seq, y_seq)
    f_n = eval_sum_type(f1, x_seq, y_seq)
    values = tuple(f1.value(x, y) for x, y in zip(x_seq, y_seq))
    total = Fraction(0)
    for _ in range(trials):
        picks = fisher_yates_subset(n, m, rng.randrange)
        sample_mean = sum((values[i - 1] for i in picks), Fraction(0)) / m
        total += abs(sample_mean - f_n)
    return total / trials


def _sqrt_enclosure(r: Fraction, scale: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(r) <= hi via integer square roots."""
    if r < 0:
        raise ValueError("negative radicand")
    target = r.numerator * r.denominator * scale * scale
    root = math.isqrt(target)
    lo = Fraction(root, r.denominator * scale)
    if root * root == target:
        return lo, lo
    return lo, Fraction(root + 1, r.denominator * scale)


@dataclass(frozen=True)
class BoundChainReport:
    """Exactly verified links of the estimation-error inequality chain."""

    expected_abs_error: Fraction        # E|sample mean - true mean|
    expected_l2_error_lo: Fraction      # rigorous enclosure of E||type error||
    expected_l2_error_hi: Fraction
    sigma_mse: Fraction                 # summed per-cell variance, exact
    l2_norm_squared: Fraction
    m: int


def verify_error_bound_chain(f1: FunctionTable, x_seq, y_seq, m: int,
                             subset_budget: int = 10**6,
                             precision: int = 10**30) -> BoundChainReport:
    """Check every link of the error chain on one instance, exactly.

    Links, in order: the pointwise inner-product inequality
    |F - f|^2 <= l2^2 * ||type error||^2 on every subset; the identity
    that the mean squared type error over subsets equals the summed
    variances; the mean-vs-root-mean-square step, with the irrational
    mean held in a rigorous rational square-root enclosure (a violation
    is flagged only when the enclosure's lower edge already breaks the
    inequality, so equality-tight cases never false-alarm); and the 1/m
    ceiling.  Raises DistortionBoundError on any violated link.
    """
    n = check_sequences(f1, x_seq, y_seq)
    count = _subset_count_within(n, m, subset_budget, "bound-chain enumeration")
    f_n = eval_sum_type(f1, x_seq, y_seq)
    full = full_frequency(x_seq, y_seq)
    true_type = {cell: Fraction(c, n) for cell, c in full.items()}
    l2_sq = f1.l2_norm_squared()

    abs_err_total = Fraction(0)
    sq_l2_total = Fraction(0)
    l2_lo_total = Fraction(0)
    l2_hi_total = Fraction(0)
    for subset in itertools.combinations(range(1, n + 1), m):
        idx = IndexSet(subset, n)
        est = partial_frequency(x_seq, y_seq, idx)
        err_sq = Fraction(0)
        cells = set(true_type) | set(est.counts)
        for cell in cells:
            diff = est.probability(*cell) - true_type.get(cell, Fraction(0))
            err_sq += diff * diff
        f_hat = estimate_function(f1, x_seq, y_seq, idx)
        gap = abs(f_hat - f_n)
        if gap * gap > l2_sq * err_sq:
            raise DistortionBoundError(
                f"inner-product step fails on subset {subset}")
        abs_err_total += gap
        sq_l2_total += err_sq
        lo, hi = _sqrt_enclosure(err_sq, precision)
        l2_lo_total += lo
        l2_hi_total += hi

    sigma_mse, _ = mse_and_l2_bounds(n, m, full)  # also asserts <= 1/m
    if Fraction(sq_l2_total, count) != sigma_mse:
        raise DistortionBoundError(
            "enumerated mean squared type error disagrees with the summed "
            "variance closed form")
    exp_l2_lo = l2_lo_total / count
    if exp_l2_lo * exp_l2_lo > sigma_mse:
        raise DistortionBoundError("mean-vs-rms step fails")
    expected_abs = abs_err_total / count
    if expected_abs * expected_abs * m > l2_sq:
        raise DistortionBoundError("end-to-end bound fails")
    return BoundChainReport(expected_abs_error=expected_abs,
                            expected_l2_error_lo=exp_l2_lo,
                            expected_l2_error_hi=l2_hi_total / count,
                            sigma_mse=sigma_mse,
                            l2_norm_squared=l2_sq,
                            m=m)


@dataclass(frozen=True)
class WorstCaseResult:
    distortion: object  # Fraction (exhaustive) or float (monte carlo)
    x_seq: tuple
    y_seq: tuple
    method: str
    trials: int | None = None


def _bound_check(distortion, f1: FunctionTable, m: int) -> None:
    if isinstance(distortion, Fraction):
        if distortion * distortion * m > f1.l2_norm_squared():
            raise DistortionBoundError(
                f"exact worst case {distortion} exceeds l2/sqrt(m) for m={m}"
            )
    else:
        if distortion > f1.l2_norm() / math.sqrt(m):
            raise DistortionBoundError(
                f"estimated worst case {distortion} exceeds l2/sqrt(m) for m={m}"
            )


def _structured_candidates(f1: FunctionTable, n: int, seed: int, random_pairs: int):
    """Adversarial and random sequence pairs for the worst-case search.

    Random pairs alone concentrate near typical behavior, so the search
    is seeded with match/mismatch block structures when the alphabets
    allow them.
    """
    pairs = []
    x_ab, y_ab = f1.x_alphabet, f1.y_alphabet
    if x_ab == y_ab and len(x_ab) >= 2:
        for name in ("all-match", "all-mismatch", "half-mismatch"):
            pairs.append(generate_pair(name, n, x_ab, y_ab))
        matched, _ = generate_pair("all-match", n, x_ab, y_ab)
        _, mism = generate_pair("all-mismatch", n, x_ab, y_ab)
        for eighths in range(1, 8):
            cut = n * eighths // 8
            pairs.append((matched, matched[:cut] + mism[cut:]))
    pairs.append(generate_pair("periodic", n, x_ab, y_ab))
    for t in range(random_pairs):
        pairs.append(generate_pair("seeded-random", n, x_ab, y_ab,
                                   seed=f"wc:{seed}:{t}"))
    seen = set()
    unique = []
    for p in pairs:
        if p not in seen:
            seen.add(p)
            unique.append(p)
    return unique


def worst_case_distortion(f1: FunctionTable, n: int, m: int,
                          mode: str = "exhaustive", *,
                          trials: int = 10_000, seed: int = 0,
                          subset_budget: int = 10**6,
                          pair_budget: int = 10**6,
                          exact_cutoff: int = 2048,
                          random_pairs: int = 16) -> WorstCaseResult:
    """Search for the sequence pair maximizing expected absolute error.

    Exhaustive mode scans every pair in the full grid of sequences and is
    exact.  Monte Carlo mode scans structured plus random candidate pairs
    and estimates each pair's expectation from ``trials`` subsamples
    (or exactly when the subset count is small), so it reports a lower
    bound on the true maximum.  Either way the result is checked against
    the l2/sqrt(m) ceiling.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if mode == "exhaustive":
        total_pairs = (len(f1.x_alphabet) * len(f1.y_alphabet)) ** n
        if total_pairs > pair_budget:
            raise EnumerationBudgetError(total_pairs, pair_budget,
                                         "sequence-pair enumeration")
        _subset_count_within(n, m, subset_budget, "subset enumeration")
        best = Fraction(-1)
        best_pair = None
        cache: dict = {}
        for xs in itertools.product(f1.x_alphabet.symbols, repeat=n):
            for ys in itertools.product(f1.y_alphabet.symbols, repeat=n):
                values = tuple(f1.value(x, y) for x, y in zip(xs, ys))
                err = cache.get(values)
                if err is None:
                    err = _expected_abs_error_from_values(values, m, subset_budget)
                    cache[values] = err
                if err > best:
                    best = err
                    best_pair = (xs, ys)
        _bound_check(best, f1, m)
        return WorstCaseResult(best, best_pair[0], best_pair[1], "exhaustive")
    if mode == "monte_carlo":
        rng = random.Random(f"wc-inner:{seed}")
        best = -1.0
        best_pair = None
        for xs, ys in _structured_candidates(f1, n, seed, random_pairs):
            if math.comb(n, m) <= exact_cutoff:
                err = float(exact_expected_abs_error(f1, xs, ys, m, subset_budget))
            else:
                err = float(sampled_expected_abs_error(f1, xs, ys, m, trials, rng))
            if err > best:
                best = err
                best_pair = (xs, ys)
        _bound_check(best, f1, m)
        return WorstCaseResult(best, best_pair[0], best_pair[1], "monte_carlo", trials)
    raise ValueError(f"unknown mode {mode!r}")
