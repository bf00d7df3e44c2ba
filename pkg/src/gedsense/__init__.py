"""Generalized energy detection with sensing-time optimization for cognitive radio."""

from .detector import (
    Decision,
    GedStatistic,
    H1Theory,
    Label,
    ced_statistic,
    decide,
    detection_loss_eta,
    ged_statistic,
    pd_theory,
    pf_theory,
    threshold_for_pf,
)
from .numerics import Tolerance, erf, erfc, erfc_inv, maximize_unimodal
from .optimizer import (
    ObjectiveCoefficients,
    OptimizationResult,
    ThroughputConfig,
    coefficients,
    objective,
    optimize_sensing_time,
    run_frame,
    threshold_schedule,
)
from .simulator import (
    ChannelModel,
    MonteCarloReport,
    NoiseModel,
    SignalModel,
    generate_trial,
    monte_carlo,
    rayleigh_vs_awgn_ordering,
)
from .spectral import (
    BandConfig,
    SampleBuffer,
    SubbandEnergies,
    SubbandPlan,
    plan_subbands,
    subband_energies,
    unitary_dft,
)

__version__ = "0.1.0"
