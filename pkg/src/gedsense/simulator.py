"""Signal, channel and noise generation plus Monte Carlo estimation of Pf/Pd.

Each trial draws from its own generator seeded by ``(seed, stream, trial)``,
so results do not depend on how trials are split across worker processes.

SNR convention: ``snr = signal_power / nominal_noise_variance`` where
``signal_power`` is the mean per-bin signal energy over the target band.
For the band-limited generators this is exactly the per-bin SNR of the
hypothesis model; for the pulse-shaped generator some of the rolloff lands
in the white band, which :func:`effective_snr` accounts for.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache, partial

import numpy as np
import scipy.fft
from scipy import integrate

from .detector import H1Theory, ced_statistic, ged_statistic, pd_theory, pf_theory
from .errors import ConfigError, DomainError
from .spectral import SampleBuffer, SubbandPlan, window_energies

H0, H1 = "H0", "H1"
_STREAM = {H0: 0, H1: 1}

RRC_SPAN_SYMBOLS = 8
LEAKAGE_LIMIT_DB = -20.0


class ChannelKind(str, Enum):
    AWGN = "awgn"
    RAYLEIGH = "rayleigh_block"


class SignalKind(str, Enum):
    FREQ_DOMAIN = "freq_domain_gaussianized"
    QPSK = "qpsk_time_domain"
    QPSK_SRRCF = "qpsk_srrcf"


@dataclass(frozen=True)
class NoiseModel:
    """Per-trial noise variance is uniform on ``[s2/eps, eps*s2]``, ``eps = 10**(dB/10)``."""

    nominal_variance: float = 100.0  # mW
    uncertainty_db: float = 0.0

    def __post_init__(self):
        if not self.nominal_variance > 0:
            raise DomainError(f"nominal_variance must be positive, got {self.nominal_variance}")
        if not self.uncertainty_db >= 0:
            raise DomainError(f"uncertainty_db must be >= 0, got {self.uncertainty_db}")

    @property
    def epsilon(self) -> float:
        return 10.0 ** (self.uncertainty_db / 10.0)

    def draw_variance(self, rng: np.random.Generator) -> float:
        # the uniform is always consumed so that the noise draws that follow
        # are identical for every uncertainty setting
        u = rng.random()
        eps = self.epsilon
        lo, hi = self.nominal_variance / eps, self.nominal_variance * eps
        return lo + u * (hi - lo)


@dataclass(frozen=True)
class ChannelModel:
    kind: ChannelKind = ChannelKind.AWGN
    signal_power: float = 1.0  # mW

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        if not self.signal_power >= 0:
            raise DomainError(f"signal_power must be >= 0, got {self.signal_power}")

    def draw_gain(self, rng: np.random.Generator) -> complex:
        """Block-fading gain, constant over the window, ``E|h|^2 = 1``."""
        g = complex(*rng.standard_normal(2)) / math.sqrt(2.0)
        return g if self.kind is ChannelKind.RAYLEIGH else 1.0 + 0.0j


@dataclass(frozen=True)
class SignalModel:
    kind: SignalKind = SignalKind.FREQ_DOMAIN
    rolloff: float = 0.0
    symbol_period: float = 0.0  # s, pulse-shaped signals only

    def __post_init__(self):
        object.__setattr__(self, "kind", SignalKind(self.kind))
        if self.kind is SignalKind.QPSK_SRRCF:
            if not 0.0 < self.rolloff <= 1.0:
                raise DomainError(f"rolloff must lie in (0, 1], got {self.rolloff}")
            if not self.symbol_period > 0:
                raise DomainError("symbol_period must be positive for a pulse-shaped signal")

    @property
    def occupied_bandwidth(self) -> float:
        return (1.0 + self.rolloff) / self.symbol_period


def trial_rng(seed: int, hypothesis: str, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(_STREAM[hypothesis], int(trial)))
    return np.random.Generator(np.random.PCG64(ss))


def _cscg(rng: np.random.Generator, n: int, variance: float) -> np.ndarray:
    return rng.standard_normal(2 * n).view(np.complex128) * math.sqrt(variance / 2.0)


def _qpsk(rng: np.random.Generator, n: int) -> np.ndarray:
    bits = rng.integers(0, 2, size=(2, n))
    return ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1])) / math.sqrt(2.0)


def rrc_pulse(t: np.ndarray, symbol_period: float, rolloff: float) -> np.ndarray:
    """Root-raised-cosine impulse response with unit energy."""
    x = np.asarray(t, dtype=float) / symbol_period
    a = rolloff
    out = np.empty_like(x)
    at_zero = np.isclose(x, 0.0, atol=1e-12)
    at_sing = np.isclose(np.abs(x), 1.0 / (4.0 * a), atol=1e-12)
    reg = ~(at_zero | at_sing)
    xr = x[reg]
    out[reg] = (np.sin(np.pi * xr * (1 - a)) + 4 * a * xr * np.cos(np.pi * xr * (1 + a))) / (
        np.pi * xr * (1 - (4 * a * xr) ** 2)
    )
    out[at_zero] = 1.0 - a + 4.0 * a / np.pi
    out[at_sing] = (a / math.sqrt(2.0)) * (
        (1 + 2 / np.pi) * math.sin(np.pi / (4 * a)) + (1 - 2 / np.pi) * math.cos(np.pi / (4 * a))
    )
    return out / math.sqrt(symbol_period)


@lru_cache(maxsize=16)
def _srrcf_bin_profile(n: int, sample_rate: float, symbol_period: float, rolloff: float) -> np.ndarray:
    """Expected per-bin signal energy (unit symbol power) for the truncated pulse.

    Includes the first alias on each side of the sampling band. Normalized so
    that its mean over all bins equals 1 (unit time-domain power).
    """
    span = RRC_SPAN_SYMBOLS * symbol_period
    dt = symbol_period / 64.0
    taps_t = np.arange(-span, span + dt / 2, dt)
    taps = rrc_pulse(taps_t, symbol_period, rolloff)
    f_grid = np.linspace(-1.5 * sample_rate, 1.5 * sample_rate, 3001)
    spec = np.abs(np.exp(-2j * np.pi * np.outer(f_grid, taps_t)) @ taps * dt) ** 2
    f_bins = scipy.fft.fftfreq(n, d=1.0 / sample_rate)
    prof = sum(np.interp(f_bins + k * sample_rate, f_grid, spec) for k in (-1, 0, 1))
    return prof / prof.mean()


def _srrcf_waveform(rng: np.random.Generator, n: int, sample_rate: float, symbol_period: float, rolloff: float) -> np.ndarray:
    """QPSK symbols through a truncated RRC pulse, sampled at ``sample_rate``; unit mean power."""
    pos = np.arange(n) / (sample_rate * symbol_period)  # sample times in symbol periods
    nearest = np.floor(pos).astype(int)
    frac = pos - nearest
    # the pulse is evaluated once per distinct sampling phase
    phase_keys, phase_id = np.unique(np.round(frac * 1e9).astype(np.int64), return_inverse=True)
    offsets = np.arange(-RRC_SPAN_SYMBOLS, RRC_SPAN_SYMBOLS + 1)
    tau = (phase_keys[:, None] * 1e-9 - offsets[None, :]) * symbol_period
    taps = np.where(np.abs(tau) <= RRC_SPAN_SYMBOLS * symbol_period, rrc_pulse(tau, symbol_period, rolloff), 0.0)
    n_sym = int(nearest[-1]) + 2 * RRC_SPAN_SYMBOLS + 1
    symbols = _qpsk(rng, n_sym)
    out = np.zeros(n, dtype=np.complex128)
    for j, off in enumerate(offsets):
        out += symbols[nearest + off + RRC_SPAN_SYMBOLS] * taps[phase_id, j]
    return out * math.sqrt(symbol_period)


def band_snrs(signal: SignalModel, plan: SubbandPlan, sample_rate: float, snr: float) -> tuple[float, float]:
    """Mean per-bin signal-to-noise ratio in the target and white bands."""
    if signal.kind is not SignalKind.QPSK_SRRCF:
        return snr, 0.0
    prof = _srrcf_bin_profile(plan.n_samples, sample_rate, signal.symbol_period, signal.rolloff)
    tgt = prof[plan.target_index()].mean()
    wht = prof[plan.white_index()].mean()
    return snr, snr * wht / tgt


def effective_snr(signal: SignalModel, plan: SubbandPlan, sample_rate: float, snr: float) -> float:
    """SNR that reproduces the expected energy ratio ``E[M_dk]/E[M_z]`` in the H1 theory."""
    st, sw = band_snrs(signal, plan, sample_rate, snr)
    if sw == 0.0:
        return st
    return (1.0 + st) / (1.0 + sw) - 1.0


def validate_models(signal: SignalModel, channel: ChannelModel, noise: NoiseModel, plan: SubbandPlan, sample_rate: float):
    """Reject model combinations the generators cannot honour.

    Raises:
        ConfigError: pulse-shaped signal with a non-centered plan, an occupied
            bandwidth wider than the sampling band, or white-band leakage
            above the limit at the configured SNR.
    """
    if signal.kind is not SignalKind.QPSK_SRRCF:
        return
    if not plan.centered:
        raise ConfigError("signal.kind", "pulse-shaped signal needs the centered band layout")
    if signal.occupied_bandwidth > sample_rate * (1 + 1e-9):
        raise ConfigError(
            "signal.symbol_period",
            f"occupied bandwidth {signal.occupied_bandwidth:.6g} Hz exceeds the {sample_rate:.6g} Hz band",
        )
    _, sw = band_snrs(signal, plan, sample_rate, channel.signal_power / noise.nominal_variance)
    if sw > 0 and 10 * math.log10(sw) > LEAKAGE_LIMIT_DB:
        raise ConfigError(
            "signal",
            f"white-band leakage {10 * math.log10(sw):.1f} dB re noise exceeds {LEAKAGE_LIMIT_DB} dB",
        )


def generate_trial(
    signal: SignalModel,
    channel: ChannelModel,
    noise: NoiseModel,
    plan: SubbandPlan,
    hypothesis: str,
    rng: np.random.Generator,
    sample_rate: float = 1.0,
) -> SampleBuffer:
    """One sensing window of ``N_s`` samples under ``hypothesis`` ("H0" or "H1")."""
    if hypothesis not in _STREAM:
        raise DomainError(f"hypothesis must be 'H0' or 'H1', got {hypothesis!r}")
    n = plan.n_samples
    variance = noise.draw_variance(rng)
    h = channel.draw_gain(rng)
    x = _cscg(rng, n, variance)
    if hypothesis == H0 or channel.signal_power == 0:
        return SampleBuffer(x, sample_rate)

    amp = h * math.sqrt(channel.signal_power)
    tgt = plan.target_index()
    if signal.kind is SignalKind.FREQ_DOMAIN:
        bins = np.zeros(n, dtype=np.complex128)
        bins[tgt] = _cscg(rng, tgt.size, 1.0)
        x += amp * scipy.fft.ifft(bins, norm="ortho")
    elif signal.kind is SignalKind.QPSK:
        spec = scipy.fft.fft(_qpsk(rng, n), norm="ortho")
        bins = np.zeros(n, dtype=np.complex128)
        bins[tgt] = spec[tgt]
        x += amp * scipy.fft.ifft(bins, norm="ortho")
    else:
        prof = _srrcf_bin_profile(n, sample_rate, signal.symbol_period, signal.rolloff)
        scale = 1.0 / math.sqrt(prof[tgt].mean())
        x += amp * scale * _srrcf_waveform(rng, n, sample_rate, signal.symbol_period, signal.rolloff)
    return SampleBuffer(x, sample_rate)


@dataclass(frozen=True)
class TrialSetup:
    """Everything a worker needs to reproduce a batch of trials."""

    signal: SignalModel
    channel: ChannelModel
    noise: NoiseModel
    plan: SubbandPlan
    sample_rate: float
    seed: int


def _trial_statistics(setup: TrialSetup, hypothesis: str, trials) -> np.ndarray:
    """Rows of (GED statistic, CED statistic with the nominal variance)."""
    out = np.empty((len(trials), 2))
    for row, i in enumerate(trials):
        rng = trial_rng(setup.seed, hypothesis, i)
        buf = generate_trial(setup.signal, setup.channel, setup.noise, setup.plan, hypothesis, rng, setup.sample_rate)
        e = window_energies(buf, setup.plan)
        out[row, 0] = ged_statistic(e, setup.plan).value
        out[row, 1] = ced_statistic(e, setup.noise.nominal_variance, setup.plan)
    return out


def simulate_statistics(setup: TrialSetup, hypothesis: str, trials: int, jobs: int = 1) -> np.ndarray:
    """Statistics of ``trials`` independent windows, shape ``(trials, 2)``: GED, CED."""
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    idx = list(range(trials))
    if jobs <= 1:
        return _trial_statistics(setup, hypothesis, idx)
    chunks = [idx[k::jobs] for k in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(partial(_trial_statistics, setup, hypothesis), chunks))
    out = np.empty((trials, 2))
    for chunk, part in zip(chunks, parts):
        out[chunk] = part
    return out


def rayleigh_average_pd(threshold: float, snr: float, n_target_bins: float, beta: float) -> float:
    """Gaussian Pd averaged over an exponential ``|h|^2`` with unit mean."""
    def integrand(g):
        return pd_theory(threshold, H1Theory.for_bins(snr * g, n_target_bins, beta)) * math.exp(-g)

    value, _ = integrate.quad(integrand, 0.0, math.inf, limit=200)
    return value


@dataclass(frozen=True)
class MonteCarloReport:
    trials: int
    threshold: float
    pf_detections: int
    pd_detections: int
    empirical_pf: float
    pf_stderr: float
    empirical_pd: float
    pd_stderr: float
    theory_pf: float
    theory_pd: float
    seed: int
    statistic: str = "ged"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @property
    def pf_within_3sigma(self) -> bool:
        return within_sigmas(self.empirical_pf, self.theory_pf, self.trials)

    @property
    def pd_within_3sigma(self) -> bool:
        return within_sigmas(self.empirical_pd, self.theory_pd, self.trials)


CSV_FIELDS = [
    ("threshold", "threshold"),
    ("theory_pf", "theory_pf"),
    ("theory_pd", "theory_pd"),
    ("empirical_pf", "empirical_pf"),
    ("pf_stderr", "pf_stderr"),
    ("empirical_pd", "empirical_pd"),
    ("pd_stderr", "pd_stderr"),
    ("trials", "trials"),
    ("pf_within_3sigma", "pf_within_3sigma"),
    ("pd_within_3sigma", "pd_within_3sigma"),
]


_UNITS = {"trials": "count", "pf_within_3sigma": "bool", "pd_within_3sigma": "bool"}


def reports_to_csv(reports) -> str:
    """One row per operating point; probabilities are dimensionless."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{name} [{_UNITS.get(name, '1')}]" for name, _ in CSV_FIELDS])
    for r in reports:
        w.writerow([_fmt(getattr(r, attr)) for _, attr in CSV_FIELDS])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def binomial_stderr(p: float, trials: int) -> float:
    return math.sqrt(p * (1.0 - p) / trials)


def within_sigmas(empirical: float, theory: float, trials: int, k: float = 3.0) -> bool:
    """``|p_hat - p| <= k`` standard errors; the error uses the theory value so a 0/1 estimate is not exempt."""
    return abs(empirical - theory) <= k * binomial_stderr(theory, trials)


@dataclass(frozen=True)
class SimulatedStatistics:
    """Per-trial statistics shared by every threshold of an ROC."""

    setup: TrialSetup
    h0: np.ndarray
    h1: np.ndarray

    @property
    def trials(self) -> int:
        return self.h0.shape[0]

    def report(self, threshold: float, statistic: str = "ged") -> MonteCarloReport:
        col = {"ged": 0, "ced": 1}[statistic]
        n = self.trials
        # detection means R >= threshold, the complement of the strict "white" rule
        k0 = int(np.sum(self.h0[:, col] >= threshold))
        k1 = int(np.sum(self.h1[:, col] >= threshold))
        pf, pd = k0 / n, k1 / n
        return MonteCarloReport(
            trials=n,
            threshold=float(threshold),
            pf_detections=k0,
            pd_detections=k1,
            empirical_pf=pf,
            pf_stderr=binomial_stderr(pf, n),
            empirical_pd=pd,
            pd_stderr=binomial_stderr(pd, n),
            theory_pf=pf_theory(threshold),
            theory_pd=self.theory_pd(threshold, statistic),
            seed=self.setup.seed,
            statistic=statistic,
        )

    def theory_pd(self, threshold: float, statistic: str = "ged") -> float:
        s = self.setup
        snr = effective_snr(s.signal, s.plan, s.sample_rate, s.channel.signal_power / s.noise.nominal_variance)
        beta = math.inf if statistic == "ced" else s.plan.beta
        if s.channel.kind is ChannelKind.RAYLEIGH:
            return rayleigh_average_pd(threshold, snr, s.plan.n_target_bins, beta)
        return pd_theory(threshold, H1Theory.for_bins(snr, s.plan.n_target_bins, beta))


def simulate(setup: TrialSetup, trials: int, jobs: int = 1) -> SimulatedStatistics:
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    validate_models(setup.signal, setup.channel, setup.noise, setup.plan, setup.sample_rate)
    return SimulatedStatistics(
        setup,
        simulate_statistics(setup, H0, trials, jobs),
        simulate_statistics(setup, H1, trials, jobs),
    )


MIN_TRIALS = 100


def monte_carlo(
    plan: SubbandPlan,
    signal: SignalModel,
    channel: ChannelModel,
    noise: NoiseModel,
    trials: int,
    threshold: float,
    seed: int,
    sample_rate: float = 1.0,
    jobs: int = 1,
    statistic: str = "ged",
) -> MonteCarloReport:
    """Empirical Pf from H0 windows and Pd from H1 windows at one threshold."""
    if trials < MIN_TRIALS:
        raise DomainError(f"need at least {MIN_TRIALS} trials, got {trials}")
    setup = TrialSetup(signal, channel, noise, plan, sample_rate, int(seed))
    return simulate(setup, trials, jobs).report(threshold, statistic)


def rayleigh_vs_awgn_ordering(report_awgn: MonteCarloReport, report_rayleigh: MonteCarloReport) -> bool:
    """True iff AWGN Pd exceeds Rayleigh Pd by more than 3 combined standard errors."""
    se = math.hypot(report_awgn.pd_stderr, report_rayleigh.pd_stderr)
    return report_awgn.empirical_pd - report_rayleigh.empirical_pd > 3.0 * se
