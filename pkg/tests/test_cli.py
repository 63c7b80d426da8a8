"""Command-line interface: flags, outputs, file writing, and exit codes.

Exit-code contract: 0 for success (including an inconclusive verification),
1 for usage or input/output problems, 2 for a verification inconsistency or
a failed selftest.
"""

import json
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

import polyurn.cli as cli
import polyurn.urns as urns
from polyurn.montecarlo import SimConfig, finals_csv_lines, run_replicates
from polyurn.ratpoly import RatPoly
from polyurn.urns import model_to_dict, two_draw_model


def run_cli(args, capsys):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# Usage errors (exit 1)
# ---------------------------------------------------------------------------

def test_no_command_is_a_usage_error(capsys):
    code, _, err = run_cli([], capsys)
    assert code == 1
    assert "usage" in err


def test_unknown_command_is_a_usage_error(capsys):
    code, _, err = run_cli(["frobnicate"], capsys)
    assert code == 1


def test_help_exits_zero(capsys):
    code, out, _ = run_cli(["--help"], capsys)
    assert code == 0
    assert "analyze" in out and "simulate" in out and "verify" in out and "selftest" in out


def test_model_flags_are_mutually_exclusive(capsys):
    code, _, err = run_cli(["analyze"], capsys)
    assert code == 1
    assert "exactly one of" in err
    code, _, err = run_cli(
        ["analyze", "--one-draw", "1,0,0,1", "--two-draw", "3,2,2,3,1,4"], capsys
    )
    assert code == 1


def test_model_file_excludes_inline_overrides(tmp_path, capsys):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model_to_dict(two_draw_model([3, 2, 2, 3, 1, 4], 2, 2))))
    code, _, err = run_cli(["analyze", "--model", str(path), "--w0", "5"], capsys)
    assert code == 1
    assert "do not combine" in err


def test_wrong_entry_count_rejected(capsys):
    code, _, err = run_cli(["analyze", "--one-draw", "1,2,3"], capsys)
    assert code == 1
    assert "4 comma-separated values" in err


def test_bad_rational_rejected(capsys):
    code, _, err = run_cli(["analyze", "--one-draw", "1,0,0,zebra"], capsys)
    assert code == 1


def test_one_draw_rejects_pair_sampling_flag(capsys):
    code, _, err = run_cli(
        ["analyze", "--one-draw", "1,0,0,1", "--sampling", "without"], capsys
    )
    assert code == 1
    assert "pair-draw" in err


def test_missing_model_file_is_an_input_error(capsys):
    code, _, err = run_cli(["analyze", "--model", "/nonexistent/model.json"], capsys)
    assert code == 1
    assert "cannot read" in err


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def test_analyze_emits_json_with_exact_rationals(capsys):
    code, out, _ = run_cli(["analyze", "--two-draw", "3,2,2,3,1,4"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["model"]["matrix"] == [["3", "2"], ["2", "3"], ["1", "4"]]
    assert payload["prediction"]["kind"] == "point-mass-set"
    assert payload["prediction"]["points"][0]["point"] == "1/3"
    assert payload["prediction"]["points"][0]["verdict"] == "converges-a.s.-unique"


def test_analyze_respects_start_and_sampling_flags(capsys):
    code, out, _ = run_cli(
        ["analyze", "--two-draw", "9,1,2,3,1,7", "--w0", "7/2", "--b0", "3",
         "--sampling", "with"], capsys
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["model"]["w0"] == "7/2"
    assert payload["model"]["sampling"] == "with"


def test_analyze_text_format(capsys):
    code, out, _ = run_cli(["analyze", "--one-draw", "1,0,0,1", "--format", "text"], capsys)
    assert code == 0
    assert "prediction" in out


def test_analyze_writes_report_file(tmp_path, capsys):
    out_path = tmp_path / "analysis.json"
    code, out, _ = run_cli(
        ["analyze", "--two-draw", "3,2,2,3,1,4", "--out", str(out_path)], capsys
    )
    assert code == 0
    assert out == ""
    payload = json.loads(out_path.read_text())
    assert payload["prediction"]["kind"] == "point-mass-set"


def test_analyze_model_file_round_trip(tmp_path, capsys):
    model = two_draw_model([9, 1, 2, 3, 1, 7], Fraction(5, 2), 2, sampling="with")
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model_to_dict(model)))
    code, out, _ = run_cli(["analyze", "--model", str(path)], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["model"] == model_to_dict(model)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_writes_finals_and_trajectories(tmp_path, capsys):
    finals = tmp_path / "finals.csv"
    traj = tmp_path / "traj.csv"
    code, out, _ = run_cli(
        ["simulate", "--one-draw", "1,0,0,1", "--steps", "50", "--replicates", "5",
         "--seed", "3", "--out", str(finals), "--trajectory-out", str(traj),
         "--trajectory-stride", "10", "--format", "csv"], capsys
    )
    assert code == 0
    assert out == ""  # CSV went to the file, not stdout

    from polyurn.urns import one_draw_model

    config = SimConfig(
        model=one_draw_model([1, 0, 0, 1], 1, 1), steps=50, replicates=5,
        base_seed=3, record_trajectory=True, trajectory_stride=10,
    )
    expected = run_replicates(config)
    assert finals.read_text() == "\n".join(finals_csv_lines(expected)) + "\n"
    lines = traj.read_text().splitlines()
    assert lines[0] == "replicate,step,Z"
    assert len(lines) == 1 + 5 * 6  # steps 0,10,20,30,40,50 per replicate


def test_simulate_csv_to_stdout_without_out(capsys):
    code, out, _ = run_cli(
        ["simulate", "--one-draw", "1,0,0,1", "--steps", "10", "--replicates", "2",
         "--format", "csv"], capsys
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "replicate,final_W,final_B,final_Z"
    assert len(lines) == 3


def test_simulate_json_summary(capsys):
    code, out, _ = run_cli(
        ["simulate", "--one-draw", "1,0,0,1", "--steps", "20", "--replicates", "8",
         "--seed", "5", "--format", "json"], capsys
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["replicates"] == 8 and payload["steps"] == 20 and payload["seed"] == 5
    assert sum(payload["histogram"]) == 8
    assert 0.0 <= payload["mean_final"] <= 1.0


def test_simulate_text_histogram(capsys):
    code, out, _ = run_cli(
        ["simulate", "--one-draw", "1,0,0,1", "--steps", "20", "--replicates", "4"], capsys
    )
    assert code == 0
    assert "final-proportion histogram:" in out


def test_simulate_rejects_invalid_start_for_pair_draws(capsys):
    code, _, err = run_cli(
        ["simulate", "--two-draw", "3,2,2,3,1,4", "--w0", "1"], capsys
    )
    assert code == 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_consistent_model_exits_zero(capsys):
    code, out, _ = run_cli(
        ["verify", "--two-draw", "3,2,2,3,1,4", "--steps", "400",
         "--replicates", "30", "--seed", "7"], capsys
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "consistent"
    assert payload["conventions"]["min_allowed_fraction"] == 0.90


def test_verify_reads_prediction_file(tmp_path, capsys):
    code, out, _ = run_cli(["analyze", "--two-draw", "3,2,2,3,1,4"], capsys)
    assert code == 0
    prediction = json.loads(out)["prediction"]
    path = tmp_path / "prediction.json"
    path.write_text(json.dumps(prediction))
    code, out, _ = run_cli(
        ["verify", "--two-draw", "3,2,2,3,1,4", "--prediction", str(path),
         "--steps", "400", "--replicates", "30", "--seed", "7"], capsys
    )
    assert code == 0
    assert json.loads(out)["verdict"] == "consistent"


def test_verify_wrong_prediction_exits_two(tmp_path, capsys):
    # A prediction borrowed from a different model points at 1/2; the
    # simulated model settles near 1/3.
    code, out, _ = run_cli(["analyze", "--two-draw", "9,1,2,3,1,7"], capsys)
    assert code == 0
    path = tmp_path / "prediction.json"
    path.write_text(json.dumps(json.loads(out)["prediction"]))
    code, out, _ = run_cli(
        ["verify", "--two-draw", "3,2,2,3,1,4", "--prediction", str(path),
         "--steps", "400", "--replicates", "30", "--seed", "7"], capsys
    )
    assert code == 2
    payload = json.loads(out)
    assert payload["verdict"] == "inconsistent"
    assert payload["reasons"]


def test_verify_unreadable_prediction_file(capsys):
    code, _, err = run_cli(
        ["verify", "--one-draw", "1,0,0,1", "--prediction", "/nonexistent.json"], capsys
    )
    assert code == 1
    assert "cannot read" in err


def test_verify_corrupt_prediction_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"kind": "no-such-kind"}')
    code, _, err = run_cli(
        ["verify", "--one-draw", "1,0,0,1", "--prediction", str(path)], capsys
    )
    assert code == 1
    assert "invalid prediction file" in err


def test_verify_inconclusive_still_exits_zero(capsys):
    # No-atoms predictions cannot be settled by clustering: exit 0, verdict
    # recorded as inconclusive.
    code, out, _ = run_cli(
        ["verify", "--two-draw", "2,0,1,1,0,2", "--steps", "200",
         "--replicates", "20"], capsys
    )
    assert code == 0
    assert json.loads(out)["verdict"] == "inconclusive"


def test_verify_text_format_and_out_file(tmp_path, capsys):
    out_path = tmp_path / "report.txt"
    code, out, _ = run_cli(
        ["verify", "--two-draw", "3,2,2,3,1,4", "--steps", "200", "--replicates", "20",
         "--seed", "7", "--format", "text", "--out", str(out_path)], capsys
    )
    assert code == 0
    assert out == ""
    text = out_path.read_text()
    assert "verdict: consistent" in text
    assert "allowed near" in text


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

EXPECTED_SUITES = {
    "boundary-drift-signs",
    "pair-bias-numerator-columns",
    "pair-variance-decomposition",
    "single-draw-bias-oracle",
    "pair-bias-oracle",
    "inactive-row-reductions",
}


def test_selftest_passes_and_lists_every_suite(capsys):
    code, out, _ = run_cli(["selftest"], capsys)
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith("suite ")]
    assert len(lines) == len(EXPECTED_SUITES)
    assert all(": PASS (" in line for line in lines)
    names = {line.split()[1].rstrip(":") for line in lines}
    assert names == EXPECTED_SUITES


def test_selftest_detects_a_broken_identity(monkeypatch, capsys):
    # Sabotage one closed form: the three bias-numerator columns must cancel,
    # so a constant 1 in the first column has to trip the suite.
    one = RatPoly((Fraction(1),))
    zero = RatPoly((Fraction(0),))
    monkeypatch.setattr(urns, "cond_iv_polys", lambda m: (one, zero, zero))
    code, out, _ = run_cli(["selftest"], capsys)
    assert code == 2
    assert "suite pair-bias-numerator-columns: FAIL" in out
    assert "suite boundary-drift-signs: PASS" in out


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def test_python_dash_m_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polyurn", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "polyurn" in proc.stdout


def test_console_script_entry_point():
    exe = shutil.which("polyurn")
    assert exe is not None, "console script should be installed with the package"
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
