import csv
import io
import math
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from prachsim.harness import (
    COLUMNS,
    CdrPoint,
    emit_results,
    parse_config,
    results_csv,
    run_cdr_sweep,
    run_pfa_calibration,
    wilson_interval,
)
from prachsim.harness.cli import main
from prachsim.harness.observe import check_spread, check_trend
from prachsim.harness.sweep import point_key, score_trial
from prachsim.receiver import Detection, DetectionReport, DetectorConfig

IDEAL_DOC = "channel.model_type: Ideal\nsweep.scenario: none\nsweep.snr_db: [40]\n"


def test_wilson_reference_values():
    # textbook value for 8 of 10
    lo, hi = wilson_interval(8, 10)
    assert lo == pytest.approx(0.4902, abs=1e-4)
    assert hi == pytest.approx(0.9433, abs=1e-4)
    assert wilson_interval(0, 0) == (0.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 5000), data=st.data())
def test_wilson_contains_estimate(n, data):
    k = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(k, n)
    assert 0.0 <= lo <= k / n <= hi <= 1.0


def test_wilson_coverage():
    rng = np.random.default_rng(0)
    n, p = 200, 0.3
    ks = rng.binomial(n, p, 4000)
    cover = np.mean([lo <= p <= hi for lo, hi in (wilson_interval(k, n) for k in ks)])
    assert 0.93 <= cover <= 0.97


def test_score_trial():
    cfg = DetectorConfig()
    hit = Detection(32, 10.0, 508, 0.78e-6)
    far = Detection(32, 10.0, 506, 1.56e-6)
    ghost = Detection(5, 9.0, 80, 0.0)
    assert score_trial(DetectionReport((hit,)), (32, 0.0), cfg) == (True, 0)
    assert score_trial(DetectionReport((hit, ghost)), (32, 0.0), cfg) == (True, 1)
    assert score_trial(DetectionReport((far,)), (32, 0.0), cfg) == (False, 1)
    assert score_trial(DetectionReport(()), (32, 0.0), cfg) == (False, 0)
    assert score_trial(DetectionReport((hit,)), (32, 0.0), cfg, "exclusive") == (True, 0)
    assert score_trial(DetectionReport((hit, ghost)), (32, 0.0), cfg, "exclusive") == (False, 1)


def test_exclusive_scoring_never_beats_contains():
    base = replace(parse_config("sweep: {snr_db: [-16], interferer_snr_db: [-17]}"), n_subframes=30)
    (a,) = run_cdr_sweep(base)
    (b,) = run_cdr_sweep(replace(base, scoring="exclusive"))
    assert b.n_correct <= a.n_correct


def test_point_keys_distinct():
    keys = [point_key(s) for s in np.arange(-40, 40.5, 0.5)]
    assert len(set(keys)) == len(keys) and min(keys) > 0


def test_clean_sweep_is_perfect():
    spec = replace(parse_config(IDEAL_DOC), n_subframes=100)
    (p,) = run_cdr_sweep(spec)
    assert p.cdr == 1.0 and p.n_false == 0 and p.n_trials == 100
    assert math.isnan(p.interferer_snr_db)


def test_buried_target_matches_false_alarm_rate():
    spec = replace(parse_config("sweep.scenario: none\nsweep.snr_db: [-40]"), n_subframes=300)
    (p,) = run_cdr_sweep(spec)
    # only a false alarm landing within the TA tolerance of the right window counts
    assert p.n_correct <= 2
    assert wilson_interval(p.n_correct, p.n_trials)[0] <= 1e-3


def test_sweep_shape_and_pairing():
    spec = replace(
        parse_config("sweep: {snr_db: [-20, -14], interferer_snr_db: [-27, -17]}"),
        n_subframes=20,
    )
    pts = run_cdr_sweep(spec)
    assert [(p.interferer_snr_db, p.snr_db) for p in pts] == [(-27, -20), (-27, -14), (-17, -20), (-17, -14)]
    # adding a grid point leaves existing points untouched
    wider = run_cdr_sweep(replace(spec, snr_db_grid=(-24.0, -20.0, -14.0)))
    assert [p for p in wider if p.snr_db != -24.0] == pts


def test_sweep_independent_of_workers():
    spec = replace(parse_config("sweep.snr_db: [-18]"), n_subframes=130)
    assert results_csv(run_cdr_sweep(spec, workers=1)) == results_csv(run_cdr_sweep(spec, workers=2))


def test_pfa_extremes():
    cfg = DetectorConfig(peak_guard_samples=0, sidelobe_rejection_db=None)
    none = run_pfa_calibration(cfg, 20, threshold_relative=np.inf)
    every = run_pfa_calibration(cfg, 20, threshold_relative=0.0)
    assert none.n_window_alarms == 0
    assert every.n_window_alarms == every.n_windows == 20 * 64
    assert every.per_subframe_rate == 1.0


def test_pfa_moderate_run():
    r = run_pfa_calibration(DetectorConfig(), 2000, master_seed=3)
    assert r.n_windows == 128_000
    assert r.threshold_relative == pytest.approx(6.0976, abs=1e-3)
    assert 0.0005 <= r.per_window_rate <= 0.002


def test_csv_layout(tmp_path):
    assert results_csv([]) == ",".join(COLUMNS) + "\n"
    p = CdrPoint("intra_cell", -20.0, -27.0, "preamble=0", 10, 7, 1, 1)
    text = results_csv([p])
    lines = text.split("\n")
    assert len(lines) == 3 and lines[2] == ""
    row = next(csv.DictReader(io.StringIO(text)))
    assert row["cdr"] == "0.700000" and row["target_snr_db"] == "-20" and row["n_false"] == "1"
    csv_path, plot_path = emit_results([p], tmp_path / "out")
    assert csv_path.read_bytes() == text.encode()
    assert b"\r" not in csv_path.read_bytes()
    compile(plot_path.read_text(), str(plot_path), "exec")


def test_csv_one_curve_per_level(tmp_path):
    spec = replace(parse_config("sweep: {snr_db: [-20, -16], interferer_snr_db: [-27, -22, -17]}"), n_subframes=5)
    csv_path, _ = emit_results(run_cdr_sweep(spec), tmp_path)
    rows = list(csv.DictReader(csv_path.open()))
    assert sorted({r["interferer_snr_db"] for r in rows}) == ["-17", "-22", "-27"]
    assert all(sum(r["interferer_snr_db"] == lv for r in rows) == 2 for lv in ("-17", "-22", "-27"))


def test_plot_script_runs(tmp_path):
    pytest.importorskip("matplotlib")
    p = CdrPoint("none", -20.0, float("nan"), "", 10, 7, 0, 1)
    _, plot_path = emit_results([p, replace(p, snr_db=-18.0, n_correct=9)], tmp_path)
    subprocess.run([sys.executable, str(plot_path)], check=True, capture_output=True)
    assert (tmp_path / "cdr.png").exists()


def _pt(snr, k, n=500):
    return CdrPoint("intra_cell", snr, -27.0, "", n, k, 0, 1)


def test_trend_check():
    low = [_pt(-20, 250), _pt(-16, 400)]
    assert check_trend(low, [_pt(-20, 200), _pt(-16, 395)])[:3] == (True, 0, 1)
    # unresolved: no point separates
    assert not check_trend(low, [_pt(-20, 245), _pt(-16, 398)])[0]
    # a significant reversal fails even with a resolved point
    assert not check_trend(low, [_pt(-20, 150), _pt(-16, 470)])[0]
    # saturated points are skipped
    assert check_trend([_pt(-20, 250), _pt(-16, 500)], [_pt(-20, 190), _pt(-16, 300)])[3] == 1


def test_spread_check():
    same = [[_pt(-20, 250)], [_pt(-20, 255)], [_pt(-20, 248)]]
    assert check_spread(same)[0]
    assert not check_spread([[_pt(-20, 250)], [_pt(-20, 400)]])[0]


def test_cli_sweep_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep: {snr_db: [-20, -16]}\n")
    assert main(["sweep", "--config", str(cfg), "--subframes", "10", "--out", str(tmp_path / "a")]) == 0
    assert main(["sweep", "--config", str(cfg), "--subframes", "10", "--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    assert (tmp_path / "a" / "cdr.csv").read_bytes() == (tmp_path / "b" / "cdr.csv").read_bytes()
    assert main(["sweep", "--config", str(cfg), "--subframes", "10", "--seed", "2", "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "cdr.csv").read_bytes() != (tmp_path / "a" / "cdr.csv").read_bytes()


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("prach:\n  preamble_index: 64\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "prach.preamble_index" in capsys.readouterr().err
    assert main(["pfa", "--subframes", "0"]) == 1


def test_cli_pfa(tmp_path, capsys):
    assert main(["pfa", "--subframes", "300", "--out", str(tmp_path)]) in (0, 2)
    assert "alarms" in capsys.readouterr().out
    assert (tmp_path / "pfa.csv").read_text().startswith("p_fa_target,")


def test_cli_selftest(capsys):
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "prachsim", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("sweep", "pfa", "observe", "selftest"):
        assert cmd in out.stdout
