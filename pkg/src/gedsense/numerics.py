"""Special functions and scalar search used throughout the package.

``erf``/``erfc`` wrap the C library implementations exposed by :mod:`math`
(relative error near machine precision, no cancellation in the erfc tail).
``erfc_inv`` starts from a rational estimate of the normal quantile and is
polished with Newton steps on ``erfc``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceError, DomainError

SQRT2 = math.sqrt(2.0)
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule for iterative routines."""

    abs_tol: float = 1e-6
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter}")


def _check_finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def erf(x: float) -> float:
    """Gauss error function."""
    return math.erf(_check_finite(x))


def erfc(x: float) -> float:
    """Complementary error function, accurate in the upper tail."""
    return math.erfc(_check_finite(x))


# Rational approximation to the standard normal quantile (P. J. Acklam).
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _normal_quantile_estimate(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    if p > 1.0 - _P_LOW:
        return -_normal_quantile_estimate(1.0 - p)
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def erfc_inv(y: float, tol: Tolerance | None = None) -> float:
    """Inverse of :func:`erfc` on the open interval (0, 2)."""
    y = _check_finite(y, "y")
    if not 0.0 < y < 2.0:
        raise DomainError(f"erfc_inv needs 0 < y < 2, got {y}")
    if y == 1.0:
        return 0.0
    if y > 1.0:
        # erfc(-x) = 2 - erfc(x); solving on the small side keeps Newton well scaled
        return -erfc_inv(2.0 - y, tol)
    tol = tol or Tolerance(abs_tol=1e-15, max_iter=50)
    x = -_normal_quantile_estimate(0.5 * y) / SQRT2
    for _ in range(tol.max_iter):
        deriv = -_TWO_OVER_SQRT_PI * math.exp(-x * x)
        if deriv == 0.0:
            break
        step = (math.erfc(x) - y) / deriv
        x -= step
        if abs(step) <= tol.abs_tol * max(1.0, abs(x)):
            break
    return x


@dataclass(frozen=True)
class SearchResult:
    argmax: float
    value: float
    iterations: int


def maximize_unimodal(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance | None = None,
) -> SearchResult:
    """Golden-section search for the maximizer of a unimodal ``f`` on ``[lo, hi]``.

    The bracket is shrunk until its width is at most ``tol.abs_tol``; the
    returned point is the best of the final bracket's evaluated points.

    Raises:
        DomainError: if ``lo >= hi``.
        ConvergenceError: if ``tol.max_iter`` iterations do not shrink the
            bracket enough. The best point so far is attached as ``best``.
    """
    tol = tol or Tolerance()
    lo, hi = _check_finite(lo, "lo"), _check_finite(hi, "hi")
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")

    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    iterations = 0
    while b - a > tol.abs_tol:
        if iterations >= tol.max_iter:
            best = SearchResult(c, fc, iterations) if fc >= fd else SearchResult(d, fd, iterations)
            raise ConvergenceError(
                f"golden-section bracket still {b - a:.3g} wide after {iterations} iterations",
                best=best,
            )
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        iterations += 1

    mid = 0.5 * (a + b)
    candidates = [(fc, c), (fd, d), (f(mid), mid)]
    value, x = max(candidates, key=lambda t: t[0])
    return SearchResult(x, value, iterations)
