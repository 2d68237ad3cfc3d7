import math
from fractions import Fraction

import pytest

from sumshare.field import PrimeField
from sumshare.functions import builtin_table
from sumshare.experiments import (CommRow, closed_form_bits, comm_csv,
                                  comm_json, comm_report, comm_text,
                                  distortion_csv, distortion_experiment,
                                  distortion_json, distortion_text,
                                  resolve_m_rule)

HAMMING = builtin_table("hamming")


class TestDistortionExperiment:
    def test_exhaustive_hamming_grid(self):
        reports = distortion_experiment(HAMMING, [4], [1, 2, 3, 4])
        assert [r.m for r in reports] == [1, 2, 3, 4]
        by_m = {r.m: r for r in reports}
        assert by_m[2].distortion == Fraction(1, 4)
        assert by_m[4].distortion == 0
        for r in reports:
            assert float(r.distortion) <= r.bound
            assert r.bound == pytest.approx(math.sqrt(2) / math.sqrt(r.m))
            assert r.method == "exhaustive"

    def test_rate_comes_from_live_run(self):
        report = distortion_experiment(HAMMING, [4], [2], protocol="poly-l")[0]
        fld = PrimeField(5)
        assert report.rate == Fraction(closed_form_bits("poly-l", 4, 2, HAMMING, fld), 4)

    def test_monte_carlo_mode(self):
        reports = distortion_experiment(HAMMING, [64], [4], mode="monte_carlo",
                                        trials=300, seed=1)
        r = reports[0]
        assert r.method == "monte_carlo"
        assert r.trials == 300
        assert r.distortion <= r.bound

    def test_workers_do_not_change_output(self):
        one = distortion_experiment(HAMMING, [4, 5], [1, 2], seed=3)
        two = distortion_experiment(HAMMING, [4, 5], [1, 2], seed=3, workers=2)
        assert distortion_csv(one) == distortion_csv(two)

    def test_m_above_n_cells_dropped(self):
        reports = distortion_experiment(HAMMING, [2, 3], [2, 3])
        assert [(r.n, r.m) for r in reports] == [(2, 2), (3, 2), (3, 3)]


class TestMRules:
    def test_sqrt_rule(self):
        assert resolve_m_rule(("sqrt",), [64, 128, 1024]) == \
            [(64, 8), (128, 12), (1024, 32)]

    def test_fixed_rule(self):
        assert resolve_m_rule(("fixed", 5), [10, 20]) == [(10, 5), (20, 5)]

    def test_custom_rule(self):
        assert resolve_m_rule(("custom", [1, 2]), [10, 20]) == [(10, 1), (20, 2)]

    def test_custom_rule_length_mismatch(self):
        with pytest.raises(ValueError):
            resolve_m_rule(("custom", [1]), [10, 20])


class TestCommReport:
    def test_pinned_field_example(self):
        # p = 211 is 8 bits: 32 indices at 10 bits plus (2*32*4 + 2)*8
        rows = comm_report("poly-l", [2**10], ("fixed", 32), HAMMING,
                           field=PrimeField(211))
        assert rows[0].bits == 320 + 2064 == 2384
        assert rows[0].rate == Fraction(2384, 1024)

    def test_meter_reconciles_across_protocols(self):
        for protocol in ("otp", "poly-l", "poly-direct"):
            f1 = builtin_table("product") if protocol == "poly-direct" else HAMMING
            rows = comm_report(protocol, [16, 64], ("sqrt",), f1, verify=True)
            assert all(r.bits > 0 for r in rows)

    def test_doubling_n_at_fixed_m_decreases_rate(self):
        rows = comm_report("poly-l", [2**7, 2**8, 2**9], ("fixed", 8), HAMMING,
                           verify=False)
        rates = [r.rate for r in rows]
        assert rates[0] > rates[1] > rates[2]

    def test_full_sample_rate_is_column_maximum(self):
        rows = comm_report("poly-l", [32], ("custom", [32]), HAMMING, verify=False)
        others = comm_report("poly-l", [32, 32, 32], ("custom", [1, 8, 16]),
                             HAMMING, verify=False)
        assert all(rows[0].rate > r.rate for r in others)

    def test_sqrt_rule_rate_strictly_decreasing(self):
        n_list = [2**k for k in range(6, 11)]
        rows = comm_report("poly-l", n_list, ("sqrt",), HAMMING, verify=True)
        rates = [r.rate for r in rows]
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_bad_m_rejected(self):
        with pytest.raises(ValueError):
            comm_report("poly-l", [4], ("fixed", 8), HAMMING, verify=False)


class TestRendering:
    def test_distortion_csv_shape_and_stability(self):
        reports = distortion_experiment(HAMMING, [4], [1, 2], seed=0)
        text = distortion_csv(reports)
        lines = text.splitlines()
        assert lines[0] == "n,m,e_n,bound,R,protocol,method,seed,trials"
        assert len(lines) == 3
        assert text == distortion_csv(
            distortion_experiment(HAMMING, [4], [1, 2], seed=0))

    def test_empty_grid_keeps_header(self):
        assert distortion_csv([]) == "n,m,e_n,bound,R,protocol,method,seed,trials\n"
        assert comm_csv([]) == "n,m,k,R\n"

    def test_comm_csv_values(self):
        rows = [CommRow(1024, 32, 2384, Fraction(2384, 1024))]
        assert comm_csv(rows).splitlines()[1] == "1024,32,2384,2.328125"

    def test_json_and_text_render(self):
        reports = distortion_experiment(HAMMING, [4], [2], seed=0)
        assert '"e_n": "1/4"' in distortion_json(reports)
        assert "1/4" in distortion_text(reports)
        rows = comm_report("poly-l", [64], ("sqrt",), HAMMING, verify=False)
        assert "64" in comm_text(rows)
        assert '"n": 64' in comm_json(rows)
