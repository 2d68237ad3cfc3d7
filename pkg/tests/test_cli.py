import json

import pytest

import negative_control
from sumshare.cli import main

HAMMING_X = "0 0 1 1\n"
HAMMING_Y = "0 1 1 0\n"


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


@pytest.fixture
def seq_files(tmp_path):
    x = tmp_path / "x.txt"
    y = tmp_path / "y.txt"
    x.write_text(HAMMING_X)
    y.write_text(HAMMING_Y)
    return str(x), str(y)


class TestRunCommand:
    def test_deterministic_output(self, capsys, seq_files):
        x, y = seq_files
        argv = ("run", "--protocol", "otp", "--f1", "hamming",
                "--x", x, "--y", y, "--m", "2", "--seed", "7")
        rc1, out1, _ = run_cli(capsys, *argv)
        rc2, out2, _ = run_cli(capsys, *argv)
        assert rc1 == rc2 == 0
        assert out1 == out2
        assert "estimate:" in out1
        assert "config: command=run" in out1

    def test_equal_n_reports_zero_error(self, capsys, seq_files):
        x, y = seq_files
        rc, out, _ = run_cli(capsys, "run", "--x", x, "--y", y,
                             "--m", "equal-n", "--seed", "3")
        assert rc == 0
        assert "abs-error: 0" in out
        assert "estimate: 1/2" in out

    def test_seed_required(self, capsys, seq_files):
        x, y = seq_files
        rc, _, err = run_cli(capsys, "run", "--x", x, "--y", y, "--m", "2")
        assert rc == 2
        assert "seed" in err

    def test_m_above_n_rejected(self, capsys, seq_files):
        x, y = seq_files
        rc, _, err = run_cli(capsys, "run", "--x", x, "--y", y,
                             "--m", "9", "--seed", "1")
        assert rc == 2

    def test_bad_symbol_reports_line(self, capsys, tmp_path):
        x = tmp_path / "x.txt"
        y = tmp_path / "y.txt"
        x.write_text("0 1\n2 1\n")
        y.write_text("0 1\n0 1\n")
        rc, _, err = run_cli(capsys, "run", "--x", str(x), "--y", str(y),
                             "--m", "1", "--seed", "1")
        assert rc == 2
        assert ":2:" in err

    def test_generated_sequences_and_outputs(self, capsys, tmp_path):
        transcript = tmp_path / "t.txt"
        blob = tmp_path / "r.json"
        rc, out, _ = run_cli(capsys, "run", "--protocol", "poly-l",
                             "--gen", "all-mismatch", "--n", "6", "--m", "3",
                             "--seed", "11", "--transcript", str(transcript),
                             "--json", str(blob))
        assert rc == 0
        assert "estimate: 1" in out
        dump = transcript.read_text()
        assert "index-set" in dump and "→" in dump
        data = json.loads(blob.read_text())
        assert data["estimate"] == "1"
        assert data["bits"] > 0

    def test_gen_conflicts_with_files(self, capsys, seq_files):
        x, y = seq_files
        rc, _, err = run_cli(capsys, "run", "--x", x, "--y", y, "--gen",
                             "all-match", "--n", "4", "--m", "1", "--seed", "1")
        assert rc == 2

    def test_config_file_with_flag_override(self, capsys, tmp_path, seq_files):
        x, y = seq_files
        conf = tmp_path / "run.conf"
        conf.write_text(f"protocol=otp\nx={x}\ny={y}\nm=2\nseed=5\n")
        rc1, out1, _ = run_cli(capsys, "run", "--config", str(conf))
        assert rc1 == 0
        assert "seed: 5" in out1
        rc2, out2, _ = run_cli(capsys, "run", "--config", str(conf),
                               "--seed", "6")
        assert rc2 == 0
        assert "seed: 6" in out2


class TestAuditCommand:
    def test_pad_protocol_passes(self, capsys):
        rc, out, _ = run_cli(capsys, "audit", "--protocol", "otp",
                             "--n", "2", "--m", "1", "--alphabets", "2,2")
        assert rc == 0
        assert "9/9 definitions pass" in out

    def test_negative_control_fails_with_exit_one(self, capsys):
        rc, out, _ = run_cli(capsys, "audit", "--protocol", "broken-otp",
                             "--f1", "product", "--n", "2", "--m", "1")
        assert rc == 1
        assert "FAIL" in out

    def test_oversized_instance_exits_two_with_required_count(self, capsys):
        rc, _, err = run_cli(capsys, "audit", "--protocol", "otp",
                             "--n", "2", "--m", "1", "--budget", "100")
        assert rc == 2
        # the first definition's enumeration: 4 variants x 1944 tapes
        assert "7776" in err

    def test_json_report_written(self, capsys, tmp_path):
        path = tmp_path / "audit.json"
        rc, _, _ = run_cli(capsys, "audit", "--protocol", "otp", "--n", "1",
                           "--m", "1", "--json", str(path))
        assert rc == 0
        reports = json.loads(path.read_text())
        assert all(r["verdict"] == "pass" for r in reports)

    def test_fixed_indices_mode(self, capsys):
        rc, out, _ = run_cli(capsys, "audit", "--protocol", "otp", "--n", "2",
                             "--m", "1", "--fixed-indices", "2")
        assert rc == 0
        assert "weaker" in out


class TestDistortionCommand:
    def test_exhaustive_csv(self, capsys):
        rc, out, _ = run_cli(capsys, "distortion", "--f1", "hamming",
                             "--n", "4", "--m", "1,2,3,4",
                             "--mode", "exhaustive", "--seed", "0")
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "n,m,e_n,bound,R,protocol,method,seed,trials"
        assert len(lines) == 5
        assert lines[2].startswith("4,2,1/4,")

    def test_empty_grid_header_only(self, capsys):
        rc, out, _ = run_cli(capsys, "distortion", "--f1", "hamming",
                             "--n", "", "--m", "")
        assert rc == 0
        assert out == "n,m,e_n,bound,R,protocol,method,seed,trials\n"

    def test_budget_exceeded_exit_two(self, capsys):
        rc, _, err = run_cli(capsys, "distortion", "--f1", "hamming",
                             "--n", "12", "--m", "2", "--pair-budget", "100")
        assert rc == 2
        assert "budget" in err

    def test_csv_file_and_json(self, capsys, tmp_path):
        out_path = tmp_path / "d.csv"
        json_path = tmp_path / "d.json"
        rc, out, _ = run_cli(capsys, "distortion", "--f1", "hamming",
                             "--n", "4", "--m", "2", "--out", str(out_path),
                             "--json", str(json_path))
        assert rc == 0
        assert out == ""
        assert out_path.read_text().count("\n") == 2
        assert json.loads(json_path.read_text())[0]["e_n"] == "1/4"


class TestCommCostCommand:
    def test_sqrt_rule_strictly_decreasing(self, capsys):
        rc, out, _ = run_cli(capsys, "comm-cost", "--protocol", "poly-l",
                             "--m-rule", "sqrt", "--n", "64,256,1024,4096")
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "n,m,k,R"
        rates = [float(l.split(",")[3]) for l in lines[1:]]
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_pinned_field_example(self, capsys):
        rc, out, _ = run_cli(capsys, "comm-cost", "--protocol", "poly-l",
                             "--m-rule", "fixed:32", "--n", "1024",
                             "--field-size", "211")
        assert rc == 0
        assert out.splitlines()[1] == "1024,32,2384,2.328125"

    def test_custom_rule_needs_m(self, capsys):
        rc, _, err = run_cli(capsys, "comm-cost", "--m-rule", "custom",
                             "--n", "64")
        assert rc == 2

    def test_unknown_rule(self, capsys):
        rc, _, err = run_cli(capsys, "comm-cost", "--m-rule", "cubic",
                             "--n", "64")
        assert rc == 2

    def test_byte_identical_reruns(self, capsys):
        argv = ("comm-cost", "--protocol", "otp", "--m-rule", "fixed:2",
                "--n", "16,32")
        rc1, out1, _ = run_cli(capsys, *argv)
        rc2, out2, _ = run_cli(capsys, *argv)
        assert rc1 == rc2 == 0
        assert out1 == out2


class TestExitCodes:
    def test_unknown_protocol_is_config_error(self, capsys):
        rc, _, err = run_cli(capsys, "run", "--protocol", "nope", "--gen",
                             "all-match", "--n", "4", "--m", "1", "--seed", "1")
        assert rc == 2

    def test_bad_config_file(self, capsys, tmp_path):
        conf = tmp_path / "bad.conf"
        conf.write_text("not a key value line\n")
        rc, _, err = run_cli(capsys, "run", "--config", str(conf))
        assert rc == 2
        assert "key=value" in err
