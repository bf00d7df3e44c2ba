"""Generalized energy detector: statistic, exact Pf/Pd theory and decision rule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateInputError, DomainError
from .numerics import SQRT2, erfc, erfc_inv
from .spectral import SubbandEnergies, SubbandPlan


def ged_prefactor(n_target_bins: float, beta: float) -> float:
    """``sqrt(N_dk * beta / (beta + 1))``; ``beta=inf`` gives the CED limit ``sqrt(N_dk)``."""
    if math.isinf(beta):
        return math.sqrt(n_target_bins)
    return math.sqrt(n_target_bins * beta / (beta + 1.0))


@dataclass(frozen=True)
class GedStatistic:
    value: float
    plan: SubbandPlan

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DegenerateInputError(f"statistic is not finite: {self.value}")


def ged_statistic(e: SubbandEnergies, plan: SubbandPlan) -> GedStatistic:
    """Normalized target/white energy ratio, ``sqrt(N_dk b/(b+1)) (M_dk/M_z - 1)``.

    Independent of the absolute noise level: scaling every sample by ``c``
    scales both energies by ``|c|^2``, which cancels in the ratio.
    """
    if not e.white > 0:
        raise DegenerateInputError("white-band energy must be positive")
    value = ged_prefactor(plan.n_target_bins, plan.beta) * (e.target / e.white - 1.0)
    return GedStatistic(value, plan)


def ced_statistic(e: SubbandEnergies, noise_variance: float, plan: SubbandPlan) -> float:
    """Conventional energy detector with an assumed noise variance."""
    if not noise_variance > 0:
        raise DomainError(f"noise variance must be positive, got {noise_variance}")
    return math.sqrt(plan.n_target_bins) * (e.target / noise_variance - 1.0)


@dataclass(frozen=True)
class H1Theory:
    """Gaussian approximation of the statistic under H1: mean ``mu``, std ``1 + snr``."""

    snr: float
    mean: float
    std: float

    def __post_init__(self):
        if not self.snr >= 0:
            raise DomainError(f"snr must be non-negative, got {self.snr}")
        if not self.std > 0:
            raise DomainError(f"std must be positive, got {self.std}")

    @classmethod
    def for_bins(cls, snr: float, n_target_bins: float, beta: float) -> "H1Theory":
        """Theory for ``N_dk`` target bins (may be fractional) and white/target ratio ``beta``.

        Pass ``beta=math.inf`` for the known-noise (CED) limit.
        """
        return cls(snr, ged_prefactor(n_target_bins, beta) * snr, 1.0 + snr)

    @classmethod
    def for_plan(cls, snr: float, plan: SubbandPlan) -> "H1Theory":
        return cls.for_bins(snr, plan.n_target_bins, plan.beta)


def pf_theory(threshold: float) -> float:
    """False-alarm probability ``P(R > threshold | H0)`` for ``R ~ N(0, 1)``."""
    return 0.5 * erfc(threshold / SQRT2)


def pd_theory(threshold: float, h1: H1Theory) -> float:
    """Detection probability ``P(R > threshold | H1)``."""
    return 0.5 * erfc((threshold - h1.mean) / (SQRT2 * h1.std))


def _check_probability(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {p}")
    return p


def threshold_for_pf(target_pf: float) -> float:
    """Threshold achieving ``target_pf``; does not depend on the band plan."""
    return SQRT2 * erfc_inv(2.0 * _check_probability(target_pf, "target_pf"))


def detection_loss_eta(target_pf: float, h1: H1Theory, plan: SubbandPlan) -> float:
    """Relative Pd loss of the GED against the known-noise detector at equal Pf.

    ``1 - Pd(GED) / Pd(CED)``, both evaluated at the threshold for ``target_pf``
    with ``N_dk`` and SNR taken from ``plan`` and ``h1``.
    """
    lam = threshold_for_pf(target_pf)
    ged = H1Theory.for_bins(h1.snr, plan.n_target_bins, plan.beta)
    ced = H1Theory.for_bins(h1.snr, plan.n_target_bins, math.inf)
    # max(0, .) absorbs last-ulp rounding when the two Pd coincide
    return max(0.0, 1.0 - pd_theory(lam, ged) / pd_theory(lam, ced))


class Label(str, Enum):
    WHITE = "white"
    NON_WHITE = "non_white"


@dataclass(frozen=True)
class Decision:
    label: Label
    statistic: GedStatistic
    threshold: float

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic.value,
            "threshold": self.threshold,
            "label": self.label.value,
        }


def decide(stat: GedStatistic, threshold: float) -> Decision:
    """White iff the statistic is strictly below the threshold; ties go to non-white."""
    label = Label.WHITE if stat.value < threshold else Label.NON_WHITE
    return Decision(label, stat, float(threshold))
