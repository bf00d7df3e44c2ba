import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gedsense.cli import EXIT_BAD_FILE, EXIT_CONFIG, EXIT_NON_WHITE, EXIT_OK, main
from gedsense.spectral import SampleBuffer, sidecar_path

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = {
    "band": {"target_bandwidth_hz": 6e5, "white_bandwidth_hz": 4e5},
    "snr_db": -20,
    "noise": {"nominal_variance_mw": 100},
    "sensing": {"sensing_time_s": 0.02, "target_pf": 0.1, "pf_points": [0.1, 0.2]},
    "trials": 100,
    "seed": 11,
}


def write_cfg(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_optimize_tv_band_summary(capsys):
    code, out, _ = run(["optimize", "--config", str(CONFIGS / "tv_band.json")], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["optimal_sensing_time_s"] == pytest.approx(50.6e-3, abs=1e-3)


def test_optimize_ced_summary(capsys):
    code, out, _ = run(["optimize", "--config", str(CONFIGS / "tv_band.json"), "--ced"], capsys)
    assert code == EXIT_OK
    s = json.loads(out)
    assert s["mode"] == "ced"
    assert s["optimal_sensing_time_s"] == pytest.approx(28.5e-3, abs=1e-3)


def test_optimize_frame_sweep_monotone(tmp_path, capsys):
    doc = json.loads((CONFIGS / "tv_band.json").read_text())
    times = []
    for tf in (0.1, 1.2, 2.0):
        doc["frame"]["frame_duration_s"] = tf
        code, out, _ = run(["optimize", "--config", write_cfg(tmp_path, doc)], capsys)
        assert code == EXIT_OK
        times.append(json.loads(out)["optimal_sensing_time_s"])
    assert times == sorted(times)


def test_optimize_writes_curve_and_summary(tmp_path, capsys):
    out_csv = tmp_path / "curve.csv"
    code, _, _ = run(["optimize", "--config", str(CONFIGS / "tv_band.json"), "--output", str(out_csv)], capsys)
    assert code == EXIT_OK
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "sensing_time [s],throughput [bit/s/Hz],normalized_throughput [1],threshold [1]"
    norm = [float(l.split(",")[2]) for l in lines[1:]]
    assert max(norm) == 1.0
    assert json.loads(out_csv.with_suffix(".json").read_text())["mode"] == "ged"
    out_json = tmp_path / "curve.json"
    run(["optimize", "--config", str(CONFIGS / "tv_band.json"), "--output", str(out_json), "--format", "json"], capsys)
    doc = json.loads(out_json.read_text())
    assert len(doc["curve"]) == len(lines) - 1


def test_roc_csv_byte_identical_and_job_invariant(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL)
    outs = []
    for jobs in ("1", "1", "2"):
        dest = tmp_path / f"roc{len(outs)}.csv"
        assert run(["roc", "--config", cfg, "--output", str(dest), "--jobs", jobs], capsys)[0] == EXIT_OK
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    header = outs[0].decode().splitlines()[0].split(",")
    assert all("[" in h and h.endswith("]") for h in header)
    assert len(outs[0].decode().splitlines()) == 3


def test_roc_json(tmp_path, capsys):
    code, out, _ = run(["roc", "--config", write_cfg(tmp_path, SMALL), "--format", "json"], capsys)
    assert code == EXIT_OK
    rows = json.loads(out)
    assert [r["theory_pf"] for r in rows] == pytest.approx([0.1, 0.2])


@pytest.mark.parametrize("trials", ["0", "50"])
def test_roc_too_few_trials_exits_2(tmp_path, capsys, trials):
    code, _, err = run(["roc", "--config", write_cfg(tmp_path, SMALL), "--trials", trials], capsys)
    assert code == EXIT_CONFIG
    assert "trials" in err


def test_seed_precedence(tmp_path, capsys, monkeypatch):
    cfg = write_cfg(tmp_path, SMALL)

    def roc(*extra):
        return run(["roc", "--config", cfg, *extra], capsys)[1]

    base = roc()
    monkeypatch.setenv("GEDSENSE_SEED", "99")
    from_env = roc()
    assert from_env != base
    assert roc("--seed", "11") == base
    monkeypatch.setenv("GEDSENSE_SEED", "11")
    assert roc() == base
    monkeypatch.setenv("GEDSENSE_SEED", "eleven")
    code, _, err = run(["roc", "--config", cfg], capsys)
    assert code == EXIT_CONFIG and "GEDSENSE_SEED" in err


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"band": {"target_bandwidth_hz": -1, "white_bandwidth_hz": 4e5}}, "band.target_bandwidth_hz"),
        ({"band": {"white_bandwidth_hz": 4e5}}, "band.target_bandwidth_hz"),
        ({"snr_db": "loud"}, "snr_db"),
        ({"channel": {"kind": "rician"}}, "channel.kind"),
        ({"sensing": {"sensing_time_s": 0.02, "target_pf": 1.5}}, "sensing.target_pf"),
        ({"frame": {"prior_h0": 0.8, "prior_h1": 0.3}}, "frame.prior_h1"),
        ({"noise": {"uncertainty_db": -1}}, "noise.uncertainty_db"),
        ({"format": "xml"}, "format"),
        ({"sensing": {"sensing_time_s": 1e-6, "pf_points": [0.1]}}, "sensing"),
    ],
)
def test_invalid_config_exits_2_with_field(tmp_path, capsys, patch, field):
    doc = {**SMALL, **patch}
    code, _, err = run(["roc", "--config", write_cfg(tmp_path, doc)], capsys)
    assert code == EXIT_CONFIG
    assert field.split(".")[0] in err


def test_missing_and_unparsable_config(tmp_path, capsys):
    assert run(["optimize", "--config", str(tmp_path / "nope.json")], capsys)[0] == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["optimize", "--config", str(bad)], capsys)[0] == EXIT_CONFIG


def test_bad_arguments_exit_2(capsys):
    assert run(["optimize"], capsys)[0] == EXIT_CONFIG
    assert run(["frobnicate"], capsys)[0] == EXIT_CONFIG


def _synth(tmp_path, capsys, doc, hypothesis, trial, name):
    cfg = write_cfg(tmp_path, doc, name + ".cfg.json")
    out = tmp_path / f"{name}.bin"
    assert run(["synth", str(out), "--config", cfg, "--hypothesis", hypothesis, "--trial", str(trial)], capsys)[0] == EXIT_OK
    return cfg, out


def test_sense_noise_only_is_mostly_white(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL)
    white = 0
    for trial in range(60):
        out = tmp_path / f"n{trial}.bin"
        run(["synth", str(out), "--config", cfg, "--trial", str(trial)], capsys)
        code, stdout, _ = run(["sense", str(out), "--config", cfg], capsys)
        d = json.loads(stdout)
        assert set(d) == {"statistic", "threshold", "label"}
        assert code == (EXIT_OK if d["label"] == "white" else EXIT_NON_WHITE)
        white += code == EXIT_OK
    # Pf = 0.1 over 60 windows: expect 54 white, 3 sigma is about 7
    assert white >= 47


def test_sense_strong_signal_is_non_white(tmp_path, capsys):
    cfg, out = _synth(tmp_path, capsys, {**SMALL, "snr_db": 0}, "H1", 0, "strong")
    code, stdout, _ = run(["sense", str(out), "--config", cfg], capsys)
    assert code == EXIT_NON_WHITE
    assert json.loads(stdout)["label"] == "non_white"


def test_sense_without_target_pf_uses_schedule(tmp_path, capsys):
    doc = {**SMALL, "sensing": {"sensing_time_s": 0.02}}
    cfg, out = _synth(tmp_path, capsys, doc, "H0", 0, "sched")
    code, stdout, _ = run(["sense", str(out), "--config", cfg], capsys)
    assert code in (EXIT_OK, EXIT_NON_WHITE)
    assert json.loads(stdout)["threshold"] != pytest.approx(1.2815515655446004)


def test_sense_truncated_file_exits_3(tmp_path, capsys):
    cfg, out = _synth(tmp_path, capsys, SMALL, "H0", 0, "trunc")
    data = out.read_bytes()
    out.write_bytes(data[: len(data) // 2 + 3])
    assert run(["sense", str(out), "--config", cfg], capsys)[0] == EXIT_BAD_FILE


def test_sense_missing_sidecar_and_garbage_exit_3(tmp_path, capsys):
    cfg, out = _synth(tmp_path, capsys, SMALL, "H0", 0, "side")
    sidecar_path(out).write_text("[]")
    assert run(["sense", str(out), "--config", cfg], capsys)[0] == EXIT_BAD_FILE
    sidecar_path(out).unlink()
    assert run(["sense", str(out), "--config", cfg], capsys)[0] == EXIT_BAD_FILE
    assert run(["sense", str(tmp_path / "absent.bin"), "--config", cfg], capsys)[0] == EXIT_BAD_FILE


def test_sense_rate_mismatch_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL)
    out = tmp_path / "rate.bin"
    SampleBuffer(np.ones(100, dtype=complex), 5e5).save(out)
    assert run(["sense", str(out), "--config", cfg], capsys)[0] == EXIT_CONFIG


def test_module_entry_point(tmp_path):
    r = subprocess.run(
        [sys.executable, "-m", "gedsense", "optimize", "--config", str(CONFIGS / "tv_band.json"), "--ced"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0
    assert json.loads(r.stdout)["mode"] == "ced"
