"""Sensing-time optimization for periodic sense-then-transmit frames.

For a sensing time ``T_o`` in a frame of length ``T_f`` the threshold is set
so that the detection constraint holds with equality,
``lam(T_o) = a sqrt(T_o) + b``, and the normalized throughput becomes

    f(T_o) = (T_f - T_o) / T_f * (psi * erf(lam(T_o) / sqrt(2)) + psi_tilde)

which is maximized over ``(1/B_k, T_f]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .detector import Decision, decide, ged_statistic, ged_prefactor
from .errors import DomainError, InsufficientSamplesError, NonUnimodalError
from .numerics import SQRT2, Tolerance, erf, erfc_inv, maximize_unimodal
from .spectral import BandConfig, SampleBuffer, n_samples_for, plan_for_samples, window_energies

SCAN_POINTS = 64


@dataclass(frozen=True)
class ThroughputConfig:
    """Frame, prior and SNR settings. SNRs are linear power ratios."""

    frame_duration: float
    band: BandConfig
    snr_target: float
    target_pd: float
    snr_secondary: float
    prior_h0: float
    prior_h1: float | None = None
    snr_primary: float | None = None  # SNR of the primary at the CR receiver; defaults to snr_target

    def __post_init__(self):
        if not (math.isfinite(self.frame_duration) and self.frame_duration > 0):
            raise DomainError(f"frame_duration must be positive, got {self.frame_duration}")
        if not 0.0 < self.target_pd < 1.0:
            raise DomainError(f"target_pd must lie in (0, 1), got {self.target_pd}")
        if not 0.0 <= self.prior_h0 <= 1.0:
            raise DomainError(f"prior_h0 must be a probability, got {self.prior_h0}")
        if self.prior_h1 is None:
            object.__setattr__(self, "prior_h1", 1.0 - self.prior_h0)
        if abs(self.prior_h0 + self.prior_h1 - 1.0) > 1e-12:
            raise DomainError(f"priors must sum to 1, got {self.prior_h0} + {self.prior_h1}")
        if self.snr_primary is None:
            object.__setattr__(self, "snr_primary", self.snr_target)
        for name in ("snr_target", "snr_secondary", "snr_primary"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be a non-negative linear ratio, got {v}")

    @property
    def min_sensing_time(self) -> float:
        """One target-band sample."""
        return 1.0 / self.band.target_bandwidth


@dataclass(frozen=True)
class ObjectiveCoefficients:
    a: float  # s^-1/2
    b: float
    psi: float
    psi_tilde: float
    rate_h0: float  # log2(1 + snr_c), bits/s/Hz
    rate_h1: float  # log2(1 + snr_c / (1 + snr_p))


def coefficients(cfg: ThroughputConfig, ced: bool = False) -> ObjectiveCoefficients:
    """Objective constants. ``ced=True`` uses the known-noise limit ``beta -> inf``."""
    beta = math.inf if ced else cfg.band.beta
    a = ged_prefactor(cfg.band.target_bandwidth, beta) * cfg.snr_target
    b = SQRT2 * (1.0 + cfg.snr_target) * erfc_inv(2.0 * cfg.target_pd)
    rate_h0 = math.log2(1.0 + cfg.snr_secondary)
    rate_h1 = math.log2(1.0 + cfg.snr_secondary / (1.0 + cfg.snr_primary))
    psi = 0.5 * cfg.prior_h0 * rate_h0
    psi_tilde = psi + cfg.prior_h1 * rate_h1 * (1.0 - cfg.target_pd)
    return ObjectiveCoefficients(a, b, psi, psi_tilde, rate_h0, rate_h1)


def threshold_schedule(coef: ObjectiveCoefficients, sensing_time: float) -> float:
    """Threshold that pins Pd to the target at sensing time ``T_o``."""
    if not sensing_time > 0:
        raise DomainError(f"sensing time must be positive, got {sensing_time}")
    return coef.a * math.sqrt(sensing_time) + coef.b


def objective(coef: ObjectiveCoefficients, sensing_time: float, frame_duration: float) -> float:
    """Normalized throughput in bits/s/Hz."""
    if not 0.0 < sensing_time <= frame_duration:
        raise DomainError(f"need 0 < T_o <= T_f, got T_o={sensing_time}, T_f={frame_duration}")
    lam = threshold_schedule(coef, sensing_time)
    return (frame_duration - sensing_time) / frame_duration * (coef.psi * erf(lam / SQRT2) + coef.psi_tilde)


def throughput_curve(cfg: ThroughputConfig, times, ced: bool = False) -> np.ndarray:
    coef = coefficients(cfg, ced)
    return np.array([objective(coef, t, cfg.frame_duration) for t in times])


@dataclass(frozen=True)
class UnimodalityScan:
    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    n_peaks: int

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.values))


def unimodality_scan(cfg: ThroughputConfig, ced: bool = False, points: int = SCAN_POINTS) -> UnimodalityScan:
    """Evaluate the objective on a coarse grid and count interior peaks.

    Steps whose magnitude is within round-off of the curve's scale are
    treated as flat so that plateaus do not register as extra peaks.
    """
    times = np.linspace(cfg.min_sensing_time, cfg.frame_duration, points)
    values = throughput_curve(cfg, times, ced)
    flat = 1e-12 * max(1.0, float(np.max(np.abs(values))))
    steps = np.diff(values)
    signs = np.sign(np.where(np.abs(steps) <= flat, 0.0, steps))
    signs = signs[signs != 0]
    n_peaks = int(np.sum((signs[:-1] > 0) & (signs[1:] < 0)))
    return UnimodalityScan(times, values, n_peaks)


@dataclass(frozen=True)
class OptimizationResult:
    sensing_time: float
    threshold: float
    max_throughput: float
    iterations: int
    ced: bool = False


def optimize_sensing_time(cfg: ThroughputConfig, tol: Tolerance | None = None, ced: bool = False) -> OptimizationResult:
    """Maximize the normalized throughput over ``(1/B_k, T_f]``.

    A coarse scan checks unimodality first; the golden-section search then
    runs on the scan cell pair around the coarse maximum.

    Raises:
        NonUnimodalError: the scan shows more than one interior peak.
        ConvergenceError: propagated from the search.
    """
    tol = tol or Tolerance()
    scan = unimodality_scan(cfg, ced)
    if scan.n_peaks > 1:
        raise NonUnimodalError(f"objective has {scan.n_peaks} interior peaks on the coarse scan", scan=scan)
    i = scan.best_index
    lo = scan.times[max(i - 1, 0)]
    hi = scan.times[min(i + 1, scan.times.size - 1)]
    coef = coefficients(cfg, ced)
    found = maximize_unimodal(lambda t: objective(coef, t, cfg.frame_duration), lo, hi, tol)
    return OptimizationResult(
        sensing_time=found.argmax,
        threshold=threshold_schedule(coef, found.argmax),
        max_throughput=found.value,
        iterations=found.iterations,
        ced=ced,
    )


def run_frame(
    cfg: ThroughputConfig,
    window: SampleBuffer,
    tol: Tolerance | None = None,
    ced: bool = False,
    layout: str = "edge",
) -> tuple[Decision, OptimizationResult]:
    """Optimize the sensing time, sense the target band on the window prefix, decide.

    Raises:
        InsufficientSamplesError: the window is shorter than ``floor(T_o* B)``.
    """
    band = cfg.band
    if not math.isclose(window.sample_rate, band.total_bandwidth, rel_tol=1e-9):
        raise DomainError(f"window sampled at {window.sample_rate} Hz, band needs {band.total_bandwidth} Hz")
    result = optimize_sensing_time(cfg, tol, ced)
    n = n_samples_for(band, result.sensing_time)
    if len(window) < n:
        raise InsufficientSamplesError(f"window holds {len(window)} samples, optimal sensing time needs {n}")
    plan = plan_for_samples(band, n, layout)
    stat = ged_statistic(window_energies(window.head(n), plan), plan)
    return decide(stat, result.threshold), result
