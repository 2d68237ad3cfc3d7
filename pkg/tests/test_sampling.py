import itertools
import math
import random
from fractions import Fraction

import pytest

from sumshare.functions import Alphabet, FunctionTable, builtin_table
from sumshare.sampling import (DistortionBoundError, EnumerationBudgetError,
                               IndexSet, JointTypeEstimate,
                               enumerate_type_moments, estimate_function,
                               exact_expected_abs_error,
                               exact_expected_abs_error_two_valued,
                               full_frequency, hypergeometric_pmf,
                               hypergeometric_stats, mse_and_l2_bounds,
                               partial_frequency, sample_indices,
                               sampled_expected_abs_error,
                               worst_case_distortion)

HAMMING = builtin_table("hamming")
X4 = ("0", "0", "1", "1")
Y4 = ("0", "1", "1", "0")


class TestIndexSet:
    def test_orders_and_validates(self):
        idx = IndexSet((3, 1), 4)
        assert idx.indices == (1, 3)
        assert idx.m == 2

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            IndexSet((0, 2), 4)
        with pytest.raises(ValueError):
            IndexSet((1, 5), 4)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            IndexSet((2, 2), 4)


class TestSampleIndices:
    def test_full_sample_forced(self):
        idx = sample_indices(5, 5, random.Random(123))
        assert idx.indices == (1, 2, 3, 4, 5)

    def test_singleton(self):
        assert sample_indices(1, 1, random.Random(0)).indices == (1,)

    def test_rejects_bad_m(self):
        with pytest.raises(ValueError):
            sample_indices(4, 0, random.Random(0))
        with pytest.raises(ValueError):
            sample_indices(4, 5, random.Random(0))

    def test_uniform_over_subsets(self):
        # frequency oracle: every 2-subset of {1..4} within 3 sigma of 1/6
        rng = random.Random(20260808)
        draws = 60_000
        counts = {c: 0 for c in itertools.combinations(range(1, 5), 2)}
        for _ in range(draws):
            counts[sample_indices(4, 2, rng).indices] += 1
        expected = draws / 6
        sigma = math.sqrt(draws * (1 / 6) * (5 / 6))
        for c, got in counts.items():
            assert abs(got - expected) <= 3 * sigma, (c, got)


class TestPartialFrequency:
    def test_direct_count(self):
        est = partial_frequency(("a", "a", "b", "b"), ("a", "b", "a", "b"),
                                IndexSet((1, 2), 4))
        assert est.probability("a", "a") == Fraction(1, 2)
        assert est.probability("a", "b") == Fraction(1, 2)
        assert est.probability("b", "a") == 0

    def test_full_sample_is_true_type(self):
        xs, ys = X4, Y4
        est = partial_frequency(xs, ys, IndexSet(tuple(range(1, 5)), 4))
        full = full_frequency(xs, ys)
        assert est.counts == full

    def test_constant_pair(self):
        est = partial_frequency(("a", "a"), ("a", "a"), IndexSet((2,), 2))
        assert est.probability("a", "a") == 1

    def test_counts_must_sum(self):
        with pytest.raises(ValueError):
            JointTypeEstimate({("a", "a"): 1}, 2)


class TestEstimateFunction:
    def test_both_mismatch(self):
        assert estimate_function(HAMMING, X4, Y4, IndexSet((2, 4), 4)) == 1

    def test_both_match(self):
        assert estimate_function(HAMMING, X4, Y4, IndexSet((1, 3), 4)) == 0

    def test_one_of_two(self):
        assert estimate_function(HAMMING, X4, Y4, IndexSet((1, 2), 4)) == Fraction(1, 2)


class TestHypergeometric:
    def test_enumerated_moments_match(self):
        mean, var = hypergeometric_stats(4, 2, 2)
        assert (mean, var) == (Fraction(1, 2), Fraction(1, 12))
        assert enumerate_type_moments(4, 2, 2) == (mean, var)

    def test_full_sample_variance_zero(self):
        assert hypergeometric_stats(6, 6, 3)[1] == 0

    def test_empty_class(self):
        assert hypergeometric_stats(6, 2, 0) == (0, 0)

    def test_n_equal_one(self):
        assert hypergeometric_stats(1, 1, 1) == (1, 0)

    def test_closed_form_equals_enumeration_small(self):
        for n in range(1, 7):
            for m in range(1, n + 1):
                for big_n in range(0, n + 1):
                    assert hypergeometric_stats(n, m, big_n) == \
                        enumerate_type_moments(n, m, big_n)

    def test_pmf_sums_to_one(self):
        total = sum(hypergeometric_pmf(10, 4, 3, k) for k in range(0, 4))
        assert total == 1


class TestMseBounds:
    def test_two_cell_example(self):
        sigma, bound = mse_and_l2_bounds(4, 2, {("a", "a"): 2, ("b", "b"): 2})
        assert sigma == Fraction(1, 6)
        assert sigma <= Fraction(1, 2)
        assert bound == pytest.approx(math.sqrt(1 / 6))

    def test_full_sample_zero(self):
        sigma, _ = mse_and_l2_bounds(4, 4, {("a", "a"): 2, ("b", "b"): 2})
        assert sigma == 0

    def test_single_cell_zero(self):
        sigma, _ = mse_and_l2_bounds(5, 2, {("a", "a"): 5})
        assert sigma == 0

    def test_inconsistent_frequencies(self):
        with pytest.raises(ValueError):
            mse_and_l2_bounds(4, 2, {("a", "a"): 3})

    def test_bound_holds_randomized(self):
        rng = random.Random(8)
        for _ in range(200):
            n = rng.randint(1, 12)
            m = rng.randint(1, n)
            cells = rng.randint(1, 4)
            splits = sorted(rng.randint(0, n) for _ in range(cells - 1))
            freqs = {}
            prev = 0
            for i, s in enumerate(splits + [n]):
                freqs[("c", str(i))] = s - prev
                prev = s
            sigma, _ = mse_and_l2_bounds(n, m, freqs)
            assert sigma <= Fraction(1, m)


class TestExactExpectedAbsError:
    def test_hamming_example(self):
        assert exact_expected_abs_error(HAMMING, X4, Y4, 2) == Fraction(1, 6)

    def test_full_sample_exact(self):
        assert exact_expected_abs_error(HAMMING, X4, Y4, 4) == 0

    def test_constant_table(self):
        ab = Alphabet(["0", "1"])
        const = FunctionTable(ab, ab, {(x, y): Fraction(3, 7) for x in ab for y in ab})
        for m in (1, 2, 3):
            assert exact_expected_abs_error(const, X4, Y4, m) == 0

    def test_budget_enforced(self):
        xs = tuple("0" for _ in range(24))
        with pytest.raises(EnumerationBudgetError) as exc:
            exact_expected_abs_error(HAMMING, xs, xs, 12, subset_budget=1000)
        assert exc.value.required == math.comb(24, 12)

    def test_two_valued_oracle_agrees(self):
        # same instance through subset enumeration and the closed pmf route
        xs = ("0",) * 6
        ys = ("0", "0", "0", "1", "1", "1")
        for m in (1, 2, 3, 6):
            direct = exact_expected_abs_error(HAMMING, xs, ys, m)
            closed = exact_expected_abs_error_two_valued(6, m, 3, Fraction(0), Fraction(1))
            assert direct == closed

    def test_sampled_estimate_near_exact(self):
        rng = random.Random(31337)
        exact = exact_expected_abs_error(HAMMING, X4, Y4, 2)
        sampled = sampled_expected_abs_error(HAMMING, X4, Y4, 2, 4000, rng)
        assert abs(float(sampled) - float(exact)) < 0.02


class TestBoundChain:
    def test_chain_on_hamming_instances(self):
        from sumshare.sampling import verify_error_bound_chain
        for m in (1, 2, 3, 4):
            report = verify_error_bound_chain(HAMMING, X4, Y4, m)
            assert report.sigma_mse <= Fraction(1, m)
            assert report.expected_abs_error * report.expected_abs_error * m \
                <= report.l2_norm_squared
            assert report.expected_l2_error_lo <= report.expected_l2_error_hi

    def test_chain_tight_at_full_sample(self):
        from sumshare.sampling import verify_error_bound_chain
        report = verify_error_bound_chain(HAMMING, X4, Y4, 4)
        assert report.expected_abs_error == 0
        assert report.expected_l2_error_hi == 0
        assert report.sigma_mse == 0

    def test_chain_on_random_instances(self):
        from sumshare.sampling import verify_error_bound_chain
        rng = random.Random(12)
        xa = Alphabet(["0", "1", "2"])
        for _ in range(25):
            vals = {(x, y): Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3)))
                    for x in xa for y in xa}
            f1 = FunctionTable(xa, xa, vals)
            n = rng.randint(1, 12)
            m = rng.randint(1, n)
            xs = tuple(rng.choice(xa.symbols) for _ in range(n))
            ys = tuple(rng.choice(xa.symbols) for _ in range(n))
            verify_error_bound_chain(f1, xs, ys, m)

    def test_cell_unbiasedness_on_sequences(self):
        # average the estimated type over every subset: exactly N/n per cell
        for n, m in ((5, 2), (6, 3), (7, 1)):
            xs = tuple(str(i % 2) for i in range(n))
            ys = tuple(str((i // 2) % 2) for i in range(n))
            full = full_frequency(xs, ys)
            totals = {}
            count = 0
            for subset in itertools.combinations(range(1, n + 1), m):
                est = partial_frequency(xs, ys, IndexSet(subset, n))
                count += 1
                for cell in full:
                    totals[cell] = totals.get(cell, Fraction(0)) + \
                        est.probability(*cell)
            for cell, big_n in full.items():
                assert totals[cell] / count == Fraction(big_n, n)


class TestWorstCase:
    def test_exhaustive_hamming_n4_m2(self):
        res = worst_case_distortion(HAMMING, 4, 2)
        assert res.distortion == Fraction(1, 4)
        assert float(res.distortion) <= HAMMING.l2_norm() / math.sqrt(2)
        # the witness pair actually attains the maximum
        assert exact_expected_abs_error(HAMMING, res.x_seq, res.y_seq, 2) == res.distortion

    def test_full_sample_zero_for_any_table(self):
        rng = random.Random(4)
        xa = Alphabet(["0", "1"])
        vals = {(x, y): Fraction(rng.randint(-3, 3), 2) for x in xa for y in xa}
        f1 = FunctionTable(xa, xa, vals)
        assert worst_case_distortion(f1, 3, 3).distortion == 0

    def test_pair_budget(self):
        with pytest.raises(EnumerationBudgetError):
            worst_case_distortion(HAMMING, 12, 2, pair_budget=1000)

    def test_monte_carlo_respects_bound(self):
        res = worst_case_distortion(HAMMING, 200, 20, mode="monte_carlo",
                                    trials=400, seed=3)
        assert res.method == "monte_carlo"
        assert res.distortion <= HAMMING.l2_norm() / math.sqrt(20)

    def test_monte_carlo_finds_structured_worst_case(self):
        # at m=1 the worst pairs are far from typical random pairs
        res = worst_case_distortion(HAMMING, 60, 1, mode="monte_carlo",
                                    trials=2000, seed=1)
        assert res.distortion > 0.3

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            worst_case_distortion(HAMMING, 4, 2, mode="nope")
