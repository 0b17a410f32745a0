"""Command-line interface: subcommands, formats, exit codes, round-trips."""

from __future__ import annotations

import json

import mpmath as mp
import pytest

from powersum import _serialize, asymptotics, cli, counting, residuals, sawtooth
from powersum.instance import Instance


def run(capsys, *argv):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ----------------------------------------------------------------------
# count / summatory
# ----------------------------------------------------------------------

class TestCountAndSummatory:
    def test_count(self, capsys):
        code, out, _ = run(capsys, "count", "--k", "2", "--s", "2", "--n", "25")
        assert code == 0
        assert out.strip() == "2"

    def test_count_rejects_negative(self, capsys):
        code, _, err = run(capsys, "count", "--k", "2", "--s", "2", "--n", "-5")
        assert code == 2
        assert "error" in err

    def test_count_floors_noninteger_with_warning(self, capsys):
        code, out, err = run(capsys, "count", "--k", "2", "--s", "2", "--n", "25.7")
        assert code == 0
        assert out.strip() == "2"
        assert "floored" in err

    def test_integral_float_does_not_warn(self, capsys):
        code, out, err = run(capsys, "count", "--k", "2", "--s", "2", "--n", "25.0")
        assert code == 0
        assert out.strip() == "2"
        assert "floored" not in err

    def test_summatory_algorithms_agree(self, capsys):
        want = str(counting.summatory_direct(Instance(k=2, s=2), 500))
        for algo in ("auto", "direct", "split", "recursive"):
            code, out, _ = run(capsys, "summatory", "--k", "2", "--s", "2",
                               "--x", "500", "--algorithm", algo)
            assert code == 0
            assert out.strip() == want, algo

    def test_summatory_recursive_three_summands(self, capsys):
        code, out, _ = run(capsys, "summatory", "--k", "3", "--s", "3",
                           "--x", "1000", "--algorithm", "recursive")
        assert code == 0
        assert out.strip() == str(counting.summatory_direct(Instance(k=3, s=3), 1000))

    def test_split_requires_two_summands(self, capsys):
        code, _, err = run(capsys, "summatory", "--k", "2", "--s", "3",
                           "--x", "100", "--algorithm", "split")
        assert code == 2
        assert "split" in err

    def test_bad_number(self, capsys):
        code, _, _ = run(capsys, "summatory", "--k", "2", "--s", "2", "--x", "abc")
        assert code == 2


# ----------------------------------------------------------------------
# asymptotic
# ----------------------------------------------------------------------

class TestAsymptotic:
    def test_payload_round_trips_bit_exactly(self, capsys):
        code, out, _ = run(capsys, "asymptotic", "--k", "4", "--s", "2",
                           "--x", "1024")
        assert code == 0
        payload = json.loads(out)
        assert payload["theorem_valid"] is True
        assert payload["predicted_exponent"] == "3/16"
        assert payload["precision_bits"] == 128
        est = asymptotics.two_term(Instance(k=4, s=2), 1024, 128)
        assert _serialize.exact_decimal_to_mpf(payload["main"], 128) == est.main_term.value
        assert _serialize.exact_decimal_to_mpf(payload["two_term"], 128) == est.two_term_value.value

    def test_precision_flag(self, capsys):
        code, out, _ = run(capsys, "asymptotic", "--k", "4", "--s", "2",
                           "--x", "1024", "--precision-bits", "64")
        assert code == 0
        assert json.loads(out)["precision_bits"] == 64

    def test_outside_theorem_gated(self, capsys):
        code, _, err = run(capsys, "asymptotic", "--k", "3", "--s", "2",
                           "--x", "100")
        assert code == 2
        assert "--allow-outside-theorem" in err

    def test_outside_theorem_allowed_with_flag(self, capsys):
        code, out, err = run(capsys, "asymptotic", "--k", "3", "--s", "2",
                             "--x", "100", "--allow-outside-theorem")
        assert code == 0
        assert "exploratory" in err
        assert json.loads(out)["theorem_valid"] is False


# ----------------------------------------------------------------------
# scan / fit
# ----------------------------------------------------------------------

class TestScanAndFit:
    def test_scan_csv_round_trip(self, capsys, tmp_path):
        out_file = tmp_path / "scan.csv"
        code, out, _ = run(capsys, "scan", "--k", "4", "--s", "2",
                           "--x-min", "1024", "--x-max", "16384",
                           "--grid", "geometric", "--output", str(out_file))
        assert code == 0
        assert out == ""
        text = out_file.read_text()
        rows = _serialize.read_scan_rows(text)
        ref = residuals.scan(Instance(k=4, s=2), 1024, 16384, grid="geometric")
        assert len(rows) == len(ref.records)
        for row, rec in zip(rows, ref.records):
            assert int(row[0]) == rec.x
            assert int(row[1]) == rec.exact
            # exact decimal serialization parses back bit-identically
            assert _serialize.exact_decimal_to_mpf(row[5], 128) == rec.residual_two

    def test_scan_json(self, capsys):
        code, out, _ = run(capsys, "scan", "--k", "4", "--s", "2",
                           "--x-min", "1024", "--x-max", "8192",
                           "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["k"] == 4
        assert payload["exploratory"] is False
        assert all(isinstance(r["exact"], str) for r in payload["records"])

    def test_scan_gating(self, capsys):
        code, _, err = run(capsys, "scan", "--k", "3", "--s", "2",
                           "--x-min", "1024", "--x-max", "8192")
        assert code == 2
        assert "--allow-outside-theorem" in err

    def test_scan_beyond_theorem_probe(self, capsys):
        code, out, _ = run(capsys, "scan", "--k", "2", "--s", "4",
                           "--x-min", "512", "--x-max", "4096",
                           "--format", "json", "--allow-outside-theorem")
        assert code == 0
        assert json.loads(out)["exploratory"] is True

    def test_scan_bad_range(self, capsys):
        code, _, _ = run(capsys, "scan", "--k", "4", "--s", "2",
                         "--x-min", "4096", "--x-max", "1024")
        assert code == 2

    def test_fit_from_scan_csv_matches_library(self, capsys, tmp_path):
        out_file = tmp_path / "scan.csv"
        run(capsys, "scan", "--k", "4", "--s", "2", "--x-min", "1024",
            "--x-max", "65536", "--grid", "geometric", "--output", str(out_file))
        code, out, _ = run(capsys, "fit", "--input", str(out_file),
                           "--which", "two_term")
        assert code == 0
        payload = json.loads(out)
        ref = residuals.scan(Instance(k=4, s=2), 1024, 65536, grid="geometric")
        want = residuals.fit_exponent(residuals.window_sup(ref, "two_term"))
        assert payload["slope"] == pytest.approx(want.slope, abs=1e-12)
        assert payload["windows_used"] == want.points_used

    def test_fit_generic_xy_csv(self, capsys, tmp_path):
        f = tmp_path / "pts.csv"
        lines = ["x,sup"] + [f"{10.0**e},{3.0 * (10.0**e) ** 0.25}" for e in range(1, 8)]
        f.write_text("\n".join(lines) + "\n")
        code, out, _ = run(capsys, "fit", "--input", str(f))
        assert code == 0
        assert json.loads(out)["slope"] == pytest.approx(0.25, abs=1e-9)

    def test_fit_synthetic_recovers_slope(self, capsys):
        code, out, _ = run(capsys, "fit", "--synthetic-slope", "0.1875",
                           "--points", "12")
        assert code == 0
        payload = json.loads(out)
        assert payload["slope"] == pytest.approx(0.1875, abs=1e-6)
        assert payload["planted_slope"] == 0.1875

    def test_fit_synthetic_seeded_noise_is_deterministic(self, capsys):
        args = ("fit", "--synthetic-slope", "0.25", "--noise", "0.2",
                "--seed", "7")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_fit_argument_validation(self, capsys, tmp_path):
        code, _, _ = run(capsys, "fit")
        assert code == 2
        f = tmp_path / "bad.csv"
        f.write_text("a,b\n1,2\n")
        code, _, err = run(capsys, "fit", "--input", str(f))
        assert code == 2
        assert "header" in err
        code, _, _ = run(capsys, "fit", "--input", str(tmp_path / "missing.csv"))
        assert code == 2


# ----------------------------------------------------------------------
# expsum / lemma3
# ----------------------------------------------------------------------

class TestExpsum:
    def test_block_table(self, capsys):
        code, out, _ = run(capsys, "expsum", "--k", "4", "--x", "16777216",
                           "--h", "1")
        assert code == 0
        lines = out.strip().splitlines()
        header = lines[0].split(",")
        assert header[:4] == ["M", "M_prime", "m_lo", "m_hi"]
        assert len(lines) >= 2
        for line in lines[1:]:
            ratio = float(line.split(",")[-1])
            assert ratio <= 10.0

    def test_single_block_zero_frequency_counts_integers(self, capsys):
        code, out, _ = run(capsys, "expsum", "--k", "4", "--x", "1048576",
                           "--h", "0", "--M", "8.0")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 2
        row = lines[1].split(",")
        m_lo, m_hi = int(row[2]), int(row[3])
        assert float(row[4]) == m_hi - m_lo + 1  # t_real is the count
        assert row[7] == ""  # no curvature columns for h = 0

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "expsum", "--k", "5", "--x", "1048576",
                           "--h", "2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["k"] == 5
        assert payload["rows"]

    def test_insufficient_precision_is_resource_error(self, capsys):
        code, _, err = run(capsys, "expsum", "--k", "4", "--x", "1e40",
                           "--h", "1", "--precision-bits", "60")
        assert code == 3
        assert "precision" in err.lower()

    def test_validation(self, capsys):
        code, _, _ = run(capsys, "expsum", "--k", "1", "--x", "100", "--h", "1")
        assert code == 2
        code, _, _ = run(capsys, "expsum", "--k", "4", "--x", "1", "--h", "1")
        assert code == 2


class TestLemma3:
    def test_pinned_value(self, capsys):
        code, out, _ = run(capsys, "lemma3", "--k", "4", "--x", "2")
        assert code == 0
        assert out.strip() == "-0.5"

    def test_matches_library(self, capsys):
        code, out, _ = run(capsys, "lemma3", "--k", "4", "--x", "65536")
        assert code == 0
        want = sawtooth.cancellation_sum(65536, 4)
        got = mp.mpf(out.strip())
        assert abs(got - want) < mp.mpf("1e-15")

    def test_gating_below_k4(self, capsys):
        code, _, err = run(capsys, "lemma3", "--k", "3", "--x", "100")
        assert code == 2
        code, out, err = run(capsys, "lemma3", "--k", "3", "--x", "100",
                             "--allow-outside-theorem")
        assert code == 0
        assert "exploratory" in err

    def test_insufficient_precision_is_resource_error(self, capsys):
        code, _, _ = run(capsys, "lemma3", "--k", "4", "--x", "1e120",
                         "--precision-bits", "64")
        assert code == 3


# ----------------------------------------------------------------------
# verify and global behavior
# ----------------------------------------------------------------------

class TestVerifyAndGlobal:
    def test_verify_quick_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--level", "quick")
        assert code == 0
        assert "PASS" in out
        assert "FAIL" not in out.splitlines()[0]
        payload = json.loads(out[out.index("{"):])
        assert payload["failed"] == 0

    def test_output_file(self, capsys, tmp_path):
        f = tmp_path / "n.txt"
        code, out, _ = run(capsys, "count", "--k", "2", "--s", "2",
                           "--n", "25", "--output", str(f))
        assert code == 0
        assert out == ""
        assert f.read_text().strip() == "2"

    def test_no_command_is_usage_error(self, capsys):
        assert cli.main([]) == 2
        capsys.readouterr()

    def test_unknown_command_is_usage_error(self, capsys):
        assert cli.main(["frobnicate"]) == 2
        capsys.readouterr()
