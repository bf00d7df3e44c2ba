"""Parameter sets of the published numerical and simulation studies."""

from __future__ import annotations

from dataclasses import replace

from .config import db_to_linear
from .optimizer import ThroughputConfig
from .simulator import ChannelModel, NoiseModel, SignalModel, SignalKind
from .spectral import BandConfig

MHZ = 1e6

# TV-band sensing example: two 6 MHz channels, -20 dB target SNR, Pd >= 0.9
TV_BAND = BandConfig(6 * MHZ, 6 * MHZ)
DESIGN_SNR_DB = -20.0
NOISE_VARIANCE_MW = 100.0


def tv_band_throughput(frame_duration: float = 2.0, band: BandConfig = TV_BAND) -> ThroughputConfig:
    return ThroughputConfig(
        frame_duration=frame_duration,
        band=band,
        snr_target=db_to_linear(DESIGN_SNR_DB),
        target_pd=0.9,
        snr_secondary=db_to_linear(20.0),
        prior_h0=0.8,
        prior_h1=0.2,
    )


FRAME_SWEEP_S = (0.1, 0.3, 0.6, 1.2, 2.0)
BANDWIDTH_CASES = (BandConfig(10 * MHZ, 10 * MHZ), BandConfig(10 * MHZ, 6 * MHZ))
BANDWIDTH_CASE_FRAME_S = 1.2

# theory-vs-simulation ROC study
ROC_BAND = BandConfig(6 * MHZ, 4.28 * MHZ)
ROC_SENSING_TIME_S = 30.3e-3
ROC_PF_POINTS = (0.01, 0.05, 0.1, 0.2, 0.3)

# noise-uncertainty study
UNCERTAINTY_DB = 2.0
UNCERTAINTY_BANDS = (BandConfig(6 * MHZ, 6 * MHZ), BandConfig(6 * MHZ, 4.28 * MHZ))
UNCERTAINTY_TARGET_PF = 0.1

# pulse-shaped signal: 1/T_s = 6 MHz, rolloff 0.2, rolloff region used as the white band
SRRCF_SYMBOL_PERIOD_S = 1.0 / (6 * MHZ)
SRRCF_ROLLOFF = 0.2
SRRCF_BAND = BandConfig(6 * MHZ, 1.2 * MHZ)
SRRCF_SENSING_TIME_S = 4.55e-3
SRRCF_SIGNAL = SignalModel(SignalKind.QPSK_SRRCF, SRRCF_ROLLOFF, SRRCF_SYMBOL_PERIOD_S)


def noise(uncertainty_db: float = 0.0) -> NoiseModel:
    return NoiseModel(NOISE_VARIANCE_MW, uncertainty_db)


def channel(kind: str = "awgn", snr_db: float = DESIGN_SNR_DB) -> ChannelModel:
    return ChannelModel(kind, db_to_linear(snr_db) * NOISE_VARIANCE_MW)


def with_frame(cfg: ThroughputConfig, frame_duration: float) -> ThroughputConfig:
    return replace(cfg, frame_duration=frame_duration)
