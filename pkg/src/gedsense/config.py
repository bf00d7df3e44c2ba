"""JSON experiment configuration.

Units at this boundary: Hz, seconds, dB for SNRs, mW for powers. SNRs are
converted to linear ratios here and nowhere else.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, DegeneratePlanError, DomainError
from .optimizer import ThroughputConfig
from .simulator import ChannelModel, NoiseModel, SignalModel, SignalKind, TrialSetup, validate_models
from .spectral import BandConfig, SubbandPlan, plan_subbands

SEED_ENV = "GEDSENSE_SEED"
DEFAULT_PF_POINTS = (0.01, 0.05, 0.1, 0.2, 0.3)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    band: BandConfig
    layout: str
    snr_db: float
    throughput: ThroughputConfig
    noise: NoiseModel
    channel: ChannelModel
    signal: SignalModel
    sensing_time: float | None = None
    target_pf: float | None = None
    pf_points: tuple[float, ...] = DEFAULT_PF_POINTS
    trials: int = 2000
    seed: int = 0
    grid_step: float = 5e-4
    output: str | None = None
    format: str = "csv"

    @property
    def snr(self) -> float:
        return db_to_linear(self.snr_db)

    @property
    def sample_rate(self) -> float:
        return self.band.total_bandwidth

    def plan(self) -> SubbandPlan:
        if self.sensing_time is None:
            raise ConfigError("sensing.sensing_time_s", "required for this command")
        try:
            return plan_subbands(self.band, self.sensing_time, self.layout)
        except (DegeneratePlanError, DomainError) as exc:
            raise ConfigError("sensing.sensing_time_s", str(exc)) from exc

    def trial_setup(self) -> TrialSetup:
        plan = self.plan()
        try:
            validate_models(self.signal, self.channel, self.noise, plan, self.sample_rate)
        except DomainError as exc:
            raise ConfigError("signal", str(exc)) from exc
        return TrialSetup(self.signal, self.channel, self.noise, plan, self.sample_rate, self.seed)


def _get(d: dict, path: str, default=None, required=False):
    node = d
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(path, "missing")
            return default
        node = node[part]
    return node


def _num(d: dict, path: str, default=None, required=False, positive=False, allow_zero=False):
    v = _get(d, path, default, required)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(path, f"expected a finite number, got {v!r}")
    if positive and not (v > 0 or (allow_zero and v == 0)):
        raise ConfigError(path, f"must be {'non-negative' if allow_zero else 'positive'}, got {v}")
    return float(v)


def _prob(d: dict, path: str, default=None, required=False):
    v = _num(d, path, default, required)
    if v is not None and not 0.0 < v < 1.0:
        raise ConfigError(path, f"must lie strictly between 0 and 1, got {v}")
    return v


def resolve_seed(config_seed, cli_seed=None) -> int:
    """CLI flag beats the environment variable, which beats the config file."""
    if cli_seed is not None:
        seed = cli_seed
    elif os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise ConfigError(SEED_ENV, f"not an integer: {os.environ[SEED_ENV]!r}") from None
    else:
        seed = config_seed
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def parse_config(d: dict, *, seed=None, trials=None) -> ExperimentConfig:
    """Validate a config document; every failure names its field."""
    if not isinstance(d, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    bk = _num(d, "band.target_bandwidth_hz", required=True, positive=True)
    bi = _num(d, "band.white_bandwidth_hz", required=True, positive=True)
    layout = _get(d, "band.layout", "edge")
    if layout not in ("edge", "centered"):
        raise ConfigError("band.layout", f"must be 'edge' or 'centered', got {layout!r}")
    band = BandConfig(bk, bi)
    snr_db = _num(d, "snr_db", required=True)

    p0 = _prob(d, "frame.prior_h0", 0.8)
    p1 = _num(d, "frame.prior_h1", 1.0 - p0)
    if abs(p0 + p1 - 1.0) > 1e-9:
        raise ConfigError("frame.prior_h1", f"priors must sum to 1, got {p0} + {p1}")
    snr_p_db = _num(d, "frame.snr_primary_db")
    throughput = ThroughputConfig(
        frame_duration=_num(d, "frame.frame_duration_s", 2.0, positive=True),
        band=band,
        snr_target=db_to_linear(snr_db),
        target_pd=_prob(d, "frame.target_pd", 0.9),
        snr_secondary=db_to_linear(_num(d, "frame.snr_secondary_db", 20.0)),
        prior_h0=p0,
        prior_h1=1.0 - p0,
        snr_primary=None if snr_p_db is None else db_to_linear(snr_p_db),
    )

    noise_var = _num(d, "noise.nominal_variance_mw", 100.0, positive=True)
    noise = NoiseModel(noise_var, _num(d, "noise.uncertainty_db", 0.0, positive=True, allow_zero=True))
    kind = _get(d, "channel.kind", "awgn")
    try:
        channel = ChannelModel(kind, db_to_linear(snr_db) * noise_var)
    except ValueError:
        raise ConfigError("channel.kind", f"must be 'awgn' or 'rayleigh_block', got {kind!r}") from None
    try:
        signal = SignalModel(
            _get(d, "signal.kind", SignalKind.FREQ_DOMAIN.value),
            _num(d, "signal.rolloff", 0.0),
            _num(d, "signal.symbol_period_s", 0.0),
        )
    except ValueError as exc:
        raise ConfigError("signal", str(exc)) from None

    sensing_time = _num(d, "sensing.sensing_time_s", positive=True)
    target_pf = _prob(d, "sensing.target_pf")
    pf_points = _get(d, "sensing.pf_points", list(DEFAULT_PF_POINTS))
    if not isinstance(pf_points, list) or not pf_points:
        raise ConfigError("sensing.pf_points", "must be a non-empty list")
    for p in pf_points:
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0 < p < 1:
            raise ConfigError("sensing.pf_points", f"entries must lie in (0, 1), got {p!r}")

    n_trials = trials if trials is not None else _get(d, "trials", 2000)
    if isinstance(n_trials, bool) or not isinstance(n_trials, int) or n_trials < 1:
        raise ConfigError("trials", f"must be a positive integer, got {n_trials!r}")
    fmt = _get(d, "format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"must be 'csv' or 'json', got {fmt!r}")

    return ExperimentConfig(
        band=band,
        layout=layout,
        snr_db=snr_db,
        throughput=throughput,
        noise=noise,
        channel=channel,
        signal=signal,
        sensing_time=sensing_time,
        target_pf=target_pf,
        pf_points=tuple(float(p) for p in pf_points),
        trials=n_trials,
        seed=resolve_seed(_get(d, "seed", 0), seed),
        grid_step=_num(d, "grid_step_s", 5e-4, positive=True),
        output=_get(d, "output"),
        format=fmt,
    )


def load_config(path, **overrides) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    return parse_config(doc, **overrides)
