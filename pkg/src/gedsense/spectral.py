"""Sub-band planning, unitary DFT and per-band average energies.

Bin indices are 0-based here. Target bin ``j`` (0-based) corresponds to the
1-based DFT index ``j + 1`` of the usual textbook layout, so the default
plan puts the target band on bins ``0 .. N_dk-1`` (frequencies ``[0, B_k)``)
and the white band on ``N_dk .. N_s-1`` (``[B_k, B)``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft

from .errors import DegenerateInputError, DegeneratePlanError, DomainError

# guards floor(T*B) against products like 0.0303 * 12e6 = 363599.99999999994
_FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class BandConfig:
    """Band geometry in Hz. The total band is ``B = B_k + B_i``."""

    target_bandwidth: float
    white_bandwidth: float

    def __post_init__(self):
        for name in ("target_bandwidth", "white_bandwidth"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive, got {v}")

    @property
    def total_bandwidth(self) -> float:
        return self.target_bandwidth + self.white_bandwidth

    @property
    def beta(self) -> float:
        """Continuous white/target bandwidth ratio ``B_i / B_k``."""
        return self.white_bandwidth / self.target_bandwidth


@dataclass(frozen=True)
class SubbandPlan:
    """DFT-bin partition of one sensing window.

    ``target_ranges`` and ``white_ranges`` are half-open 0-based ``(start,
    stop)`` bin ranges. The default layout has one range each; the centered
    layout splits both bands across the DC/Nyquist wrap.
    """

    n_samples: int
    n_target_bins: int
    target_ranges: tuple[tuple[int, int], ...] = field(default=())
    white_ranges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.n_target_bins < 1 or self.n_white_bins < 1:
            raise DegeneratePlanError(
                f"plan maps a sub-band to zero bins (N_s={self.n_samples}, N_dk={self.n_target_bins})"
            )
        if not self.target_ranges:
            object.__setattr__(self, "target_ranges", ((0, self.n_target_bins),))
        if not self.white_ranges:
            object.__setattr__(self, "white_ranges", ((self.n_target_bins, self.n_samples),))
        if sum(b - a for a, b in self.target_ranges) != self.n_target_bins:
            raise DegeneratePlanError("target ranges do not cover N_dk bins")
        if sum(b - a for a, b in self.white_ranges) != self.n_white_bins:
            raise DegeneratePlanError("white ranges do not cover N_z bins")

    @property
    def n_white_bins(self) -> int:
        return self.n_samples - self.n_target_bins

    @property
    def beta(self) -> float:
        return self.n_white_bins / self.n_target_bins

    @property
    def centered(self) -> bool:
        return len(self.target_ranges) > 1 or self.target_ranges[0][0] != 0

    def target_index(self) -> np.ndarray:
        return np.concatenate([np.arange(a, b) for a, b in self.target_ranges])

    def white_index(self) -> np.ndarray:
        return np.concatenate([np.arange(a, b) for a, b in self.white_ranges])


def n_samples_for(band: BandConfig, sensing_time: float) -> int:
    """``N_s = floor(T_ts * B)``."""
    if not (math.isfinite(sensing_time) and sensing_time > 0):
        raise DomainError(f"sensing time must be positive, got {sensing_time}")
    return int(math.floor(sensing_time * band.total_bandwidth * (1 + _FLOOR_SLACK)))


def plan_for_samples(band: BandConfig, n_samples: int, layout: str = "edge") -> SubbandPlan:
    """Plan for a window of ``n_samples`` samples taken at rate ``B``.

    ``layout="edge"`` puts the target band at ``[0, B_k)`` and the white band
    above it. ``layout="centered"`` treats the target band as ``[-B_k/2,
    B_k/2]`` around DC with the white band split over both edges, which is
    how a pulse-shaped signal's rolloff region is used.
    """
    if n_samples < 1:
        raise DegeneratePlanError(f"window holds {n_samples} samples")
    ratio = band.target_bandwidth / band.total_bandwidth
    n_dk = int(math.floor(ratio * n_samples * (1 + _FLOOR_SLACK)))
    n_dk = min(n_dk, n_samples)
    if n_dk < 1 or n_samples - n_dk < 1:
        raise DegeneratePlanError(
            f"N_s={n_samples} with B_k/B={ratio:.4g} leaves N_dk={n_dk}, N_z={n_samples - n_dk}"
        )
    if layout == "edge":
        return SubbandPlan(n_samples, n_dk)
    if layout == "centered":
        n_pos = (n_dk + 1) // 2  # DC bin plus positive frequencies
        n_neg = n_dk - n_pos
        target = ((0, n_pos),) + (((n_samples - n_neg, n_samples),) if n_neg else ())
        white = ((n_pos, n_samples - n_neg),)
        return SubbandPlan(n_samples, n_dk, target, white)
    raise DomainError(f"unknown layout {layout!r}")


def plan_subbands(band: BandConfig, sensing_time: float, layout: str = "edge") -> SubbandPlan:
    return plan_for_samples(band, n_samples_for(band, sensing_time), layout)


@dataclass(frozen=True)
class SampleBuffer:
    """Complex baseband samples of one sensing window, taken at ``sample_rate`` Hz."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.ndim != 1:
            raise DomainError("samples must be one-dimensional")
        object.__setattr__(self, "samples", s)
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate}")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def head(self, n: int) -> "SampleBuffer":
        return SampleBuffer(self.samples[:n], self.sample_rate)

    def save(self, path) -> Path:
        """Write interleaved little-endian float64 (re, im) pairs plus a JSON sidecar.

        Returns the sidecar path (``<path>.json``).
        """
        path = Path(path)
        interleaved = np.empty(2 * self.samples.size, dtype="<f8")
        interleaved[0::2] = self.samples.real
        interleaved[1::2] = self.samples.imag
        path.write_bytes(interleaved.tobytes())
        meta = sidecar_path(path)
        meta.write_text(json.dumps({"sample_rate": self.sample_rate, "length": int(self.samples.size)}))
        return meta

    @classmethod
    def load(cls, path) -> "SampleBuffer":
        """Read a buffer written by :meth:`save`.

        Raises ``ValueError`` (or ``OSError``) when the file and sidecar disagree.
        """
        path = Path(path)
        meta = json.loads(sidecar_path(path).read_text())
        length = int(meta["length"])
        rate = float(meta["sample_rate"])
        raw = path.read_bytes()
        if len(raw) != 16 * length:
            raise ValueError(f"{path}: expected {16 * length} bytes for {length} samples, found {len(raw)}")
        pairs = np.frombuffer(raw, dtype="<f8")
        samples = pairs[0::2] + 1j * pairs[1::2]
        if not np.all(np.isfinite(samples)):
            raise ValueError(f"{path}: non-finite samples")
        return cls(samples, rate)


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def unitary_dft(buf: SampleBuffer | np.ndarray) -> np.ndarray:
    """DFT scaled by ``1/sqrt(N_s)`` so that energy is preserved."""
    x = buf.samples if isinstance(buf, SampleBuffer) else np.asarray(buf, dtype=np.complex128)
    if x.size == 0:
        raise DomainError("empty buffer")
    return scipy.fft.fft(x, norm="ortho")


@dataclass(frozen=True)
class SubbandEnergies:
    target: float  # M_dk, mean |bin|^2 over target bins
    white: float  # M_z, mean |bin|^2 over white bins


def subband_energies(bins: np.ndarray, plan: SubbandPlan) -> SubbandEnergies:
    bins = np.asarray(bins)
    if bins.size != plan.n_samples:
        raise DomainError(f"got {bins.size} bins for a plan with N_s={plan.n_samples}")
    power = bins.real ** 2 + bins.imag ** 2
    target = sum(power[a:b].sum() for a, b in plan.target_ranges) / plan.n_target_bins
    white = sum(power[a:b].sum() for a, b in plan.white_ranges) / plan.n_white_bins
    if not white > 0:
        raise DegenerateInputError("white band carries zero energy")
    return SubbandEnergies(float(target), float(white))


def window_energies(buf: SampleBuffer, plan: SubbandPlan) -> SubbandEnergies:
    """Transform a window and average its energy per sub-band."""
    if len(buf) != plan.n_samples:
        raise DomainError(f"window has {len(buf)} samples, plan expects {plan.n_samples}")
    return subband_energies(unitary_dft(buf), plan)
