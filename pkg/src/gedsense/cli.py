"""Command-line front end.

Exit codes: 0 success (``sense``: white), 1 ``sense`` found the band
non-white, 2 invalid configuration or arguments, 3 malformed sample file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import presets
from .config import ExperimentConfig, load_config, resolve_seed
from .detector import decide, ged_statistic, threshold_for_pf
from .errors import ConfigError, DegenerateInputError, DegeneratePlanError, DomainError, GedsenseError
from .optimizer import coefficients, objective, optimize_sensing_time, threshold_schedule
from .simulator import (
    H0,
    H1,
    MIN_TRIALS,
    ChannelKind,
    TrialSetup,
    generate_trial,
    reports_to_csv,
    simulate,
    trial_rng,
)
from .spectral import SampleBuffer, plan_for_samples, plan_subbands, window_energies

EXIT_OK, EXIT_NON_WHITE, EXIT_CONFIG, EXIT_BAD_FILE = 0, 1, 2, 3


class _BadFile(Exception):
    pass


def _write_csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row] for row in rows])
    return buf.getvalue()


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _check_format(fmt):
    if fmt not in ("csv", "json"):
        raise ConfigError("--format", f"must be csv or json, got {fmt!r}")


# --- optimize --------------------------------------------------------------

def throughput_rows(cfg, grid_step: float, ced: bool = False):
    tp = cfg if not isinstance(cfg, ExperimentConfig) else cfg.throughput
    coef = coefficients(tp, ced)
    lo = tp.min_sensing_time
    n = int(math.floor((tp.frame_duration - lo) / grid_step)) + 1
    times = lo + grid_step * np.arange(n)
    values = [objective(coef, t, tp.frame_duration) for t in times]
    peak = max(values)
    return [(float(t), float(v), float(v / peak), threshold_schedule(coef, float(t))) for t, v in zip(times, values)]


OPTIMIZE_HEADER = ["sensing_time [s]", "throughput [bit/s/Hz]", "normalized_throughput [1]", "threshold [1]"]


def optimize_summary(tp, ced: bool) -> dict:
    res = optimize_sensing_time(tp, ced=ced)
    return {
        "mode": "ced" if ced else "ged",
        "frame_duration_s": tp.frame_duration,
        "target_bandwidth_hz": tp.band.target_bandwidth,
        "white_bandwidth_hz": tp.band.white_bandwidth,
        "optimal_sensing_time_s": res.sensing_time,
        "optimal_threshold": res.threshold,
        "max_throughput_bits_per_s_per_hz": res.max_throughput,
        "max_throughput_bits_per_s": res.max_throughput * tp.band.target_bandwidth,
        "iterations": res.iterations,
    }


def cmd_optimize(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    fmt = args.format or cfg.format
    _check_format(fmt)
    output = args.output or cfg.output
    summary = optimize_summary(cfg.throughput, args.ced)
    if output:
        rows = throughput_rows(cfg, cfg.grid_step, args.ced)
        if fmt == "csv":
            Path(output).write_text(_write_csv(rows, OPTIMIZE_HEADER))
            Path(output).with_suffix(".json").write_text(json.dumps(summary, indent=2) + "\n")
        else:
            curve = [dict(zip(("sensing_time_s", "throughput", "normalized_throughput", "threshold"), r)) for r in rows]
            Path(output).write_text(json.dumps({"summary": summary, "curve": curve}, indent=2) + "\n")
    print(json.dumps(summary, indent=2))
    return EXIT_OK


# --- roc -------------------------------------------------------------------

def cmd_roc(args) -> int:
    cfg = load_config(args.config, seed=args.seed, trials=args.trials)
    fmt = args.format or cfg.format
    _check_format(fmt)
    if cfg.trials < MIN_TRIALS:
        raise ConfigError("trials", f"need at least {MIN_TRIALS}, got {cfg.trials}")
    stats = simulate(cfg.trial_setup(), cfg.trials, jobs=args.jobs)
    reports = [stats.report(threshold_for_pf(p)) for p in cfg.pf_points]
    if fmt == "csv":
        text = reports_to_csv(reports)
    else:
        text = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    _emit(text, args.output or cfg.output)
    return EXIT_OK


# --- sense / synth ---------------------------------------------------------

def _load_window(path) -> SampleBuffer:
    try:
        return SampleBuffer.load(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise _BadFile(str(exc)) from None


def cmd_sense(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    buf = _load_window(args.signal)
    if not math.isclose(buf.sample_rate, cfg.sample_rate, rel_tol=1e-9):
        raise ConfigError("band", f"file sampled at {buf.sample_rate} Hz but the band spans {cfg.sample_rate} Hz")
    try:
        plan = plan_for_samples(cfg.band, len(buf), cfg.layout)
        stat = ged_statistic(window_energies(buf, plan), plan)
    except (DegeneratePlanError, DegenerateInputError) as exc:
        raise _BadFile(str(exc)) from None
    if cfg.target_pf is not None:
        threshold = threshold_for_pf(cfg.target_pf)
    else:
        threshold = threshold_schedule(coefficients(cfg.throughput), buf.duration)
    decision = decide(stat, threshold)
    print(json.dumps(decision.to_dict()))
    return EXIT_OK if decision.label.value == "white" else EXIT_NON_WHITE


def cmd_synth(args) -> int:
    """Write one simulated window (for exercising ``sense``)."""
    cfg = load_config(args.config, seed=args.seed)
    setup = cfg.trial_setup()
    rng = trial_rng(setup.seed, args.hypothesis, args.trial)
    buf = generate_trial(setup.signal, setup.channel, setup.noise, setup.plan, args.hypothesis, rng, setup.sample_rate)
    buf.save(args.out)
    return EXIT_OK


# --- figures ---------------------------------------------------------------

FIGURE_HEADER = ["case", "sensing_time [s]", "throughput [bit/s/Hz]", "normalized_throughput [1]"]


def _curve_rows(case, tp, step, ced=False):
    return [(case, t, v, nv) for t, v, nv, _ in throughput_rows(tp, step, ced)]


def figure_tables(trials: int, seed: int, jobs: int = 1, step: float = 5e-4) -> dict[str, str]:
    """All figure data as CSV text keyed by file name."""
    out = {}
    rows = []
    for tf in presets.FRAME_SWEEP_S:
        rows += _curve_rows(f"T_f={tf}s", presets.tv_band_throughput(tf), step)
    out["fig2.csv"] = _write_csv(rows, FIGURE_HEADER)

    rows = []
    for band in presets.BANDWIDTH_CASES:
        tp = presets.tv_band_throughput(presets.BANDWIDTH_CASE_FRAME_S, band)
        rows += _curve_rows(f"B_k={band.target_bandwidth/1e6:g}MHz,B_i={band.white_bandwidth/1e6:g}MHz", tp, step)
    out["fig3.csv"] = _write_csv(rows, FIGURE_HEADER)

    tp = presets.tv_band_throughput(2.0)
    rows = _curve_rows("GED", tp, step) + _curve_rows("CED", tp, step, ced=True)
    out["fig4.csv"] = _write_csv(rows, FIGURE_HEADER)

    plan = plan_subbands(presets.ROC_BAND, presets.ROC_SENSING_TIME_S)
    setup = TrialSetup(presets.SignalModel(), presets.channel(), presets.noise(), plan, presets.ROC_BAND.total_bandwidth, seed)
    stats = simulate(setup, trials, jobs)
    out["fig5.csv"] = reports_to_csv([stats.report(threshold_for_pf(p)) for p in presets.ROC_PF_POINTS])

    lam = threshold_for_pf(presets.UNCERTAINTY_TARGET_PF)
    header = ["beta [1]", "channel", "uncertainty [dB]", "empirical_pf [1]", "pf_stderr [1]", "empirical_pd [1]", "pd_stderr [1]", "theory_pd [1]"]
    rows = []
    for band in presets.UNCERTAINTY_BANDS:
        plan = plan_subbands(band, presets.ROC_SENSING_TIME_S)
        for kind in (ChannelKind.AWGN, ChannelKind.RAYLEIGH):
            setup = TrialSetup(presets.SignalModel(), presets.channel(kind), presets.noise(presets.UNCERTAINTY_DB), plan, band.total_bandwidth, seed)
            r = simulate(setup, trials, jobs).report(lam)
            rows.append((plan.beta, kind.value, presets.UNCERTAINTY_DB, r.empirical_pf, r.pf_stderr, r.empirical_pd, r.pd_stderr, r.theory_pd))
    out["fig6.csv"] = _write_csv(rows, header)
    return out


def cmd_figures(args) -> int:
    trials = args.trials if args.trials is not None else 2000
    if trials < MIN_TRIALS:
        raise ConfigError("--trials", f"need at least {MIN_TRIALS}, got {trials}")
    seed = resolve_seed(0, args.seed)
    outdir = Path(args.output or "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    for name, text in figure_tables(trials, seed, args.jobs).items():
        (outdir / name).write_text(text)
        print(outdir / name)
    return EXIT_OK


# --- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gedsense", description="Generalized energy detection and sensing-time optimization.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--seed", type=int, help="RNG seed (overrides $GEDSENSE_SEED and the config)")
        sp.add_argument("--output", help="output path")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for Monte Carlo")

    sp = sub.add_parser("optimize", help="optimal sensing time and throughput curve")
    common(sp)
    sp.add_argument("--ced", action="store_true", help="known-noise limit (beta -> inf)")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("roc", help="Monte Carlo ROC against theory")
    common(sp)
    sp.add_argument("--trials", type=int)
    sp.set_defaults(func=cmd_roc)

    sp = sub.add_parser("sense", help="decide on a recorded window")
    sp.add_argument("signal", help="binary sample file (a <file>.json sidecar must exist)")
    common(sp)
    sp.set_defaults(func=cmd_sense)

    sp = sub.add_parser("synth", help="write a simulated window")
    sp.add_argument("out")
    common(sp)
    sp.add_argument("--hypothesis", choices=(H0, H1), default=H0)
    sp.add_argument("--trial", type=int, default=0)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("figures", help="write fig2.csv .. fig6.csv")
    common(sp, config=False)
    sp.add_argument("--trials", type=int)
    sp.set_defaults(func=cmd_figures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs: must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except _BadFile as exc:
        print(f"error: malformed sample file: {exc}", file=sys.stderr)
        return EXIT_BAD_FILE
    except ConfigError as exc:
        print(f"error: {exc.field}: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, GedsenseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
