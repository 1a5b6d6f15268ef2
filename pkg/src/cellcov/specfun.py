"""Scalar special functions used by the coverage and rate formulas."""

from __future__ import annotations

import math

from scipy.special import erfcx, gammaincc

__all__ = [
    "gaussian_q",
    "gaussian_q_scaled",
    "upper_incomplete_gamma",
    "gamma_neg",
]

_SQRT2 = math.sqrt(2.0)


def gaussian_q(x: float) -> float:
    """Standard normal tail probability Q(x) = P[N(0,1) > x].

    Total on finite reals; absolute error below 1e-14, and the reflection
    Q(-x) = 1 - Q(x) holds to the same accuracy.
    """
    return 0.5 * math.erfc(x / _SQRT2)


def gaussian_q_scaled(x: float) -> float:
    """Overflow-safe Q(x) * exp(x**2 / 2).

    For large x this is ~ 1/(x*sqrt(2*pi)) while the two factors separately
    under/overflow; evaluated through the scaled complementary error
    function, valid for all finite x.
    """
    return 0.5 * erfcx(x / _SQRT2)


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma integral of t**(a-1) * exp(-t) over [x, inf).

    Supports a > 0 (x >= 0) and -1 < a < 0 (x > 0).  The negative-parameter
    branch takes one recurrence step up to a+1 in (0, 1), which is free of
    cancellation at small x where the integral blows up like x**a.
    """
    if not (math.isfinite(a) and math.isfinite(x)):
        raise ValueError("arguments must be finite")
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    if a > 0.0:
        return gammaincc(a, x) * math.gamma(a)
    if a == 0.0 or a <= -1.0:
        raise ValueError(f"parameter a={a!r} outside (-1,0) and (0,inf)")
    if x == 0.0:
        raise ValueError("integral diverges at the origin for a < 0")
    # a in (-1, 0): Gamma(a, x) = (Gamma(a+1, x) - x**a * exp(-x)) / a
    return (upper_incomplete_gamma(a + 1.0, x) - x ** a * math.exp(-x)) / a


def gamma_neg(z: float) -> float:
    """Gamma function on (-1, 0), via Gamma(z) = Gamma(z+1) / z."""
    if not (-1.0 < z < 0.0):
        raise ValueError(f"gamma_neg requires -1 < z < 0, got {z!r}")
    out = math.gamma(z + 1.0) / z
    if not math.isfinite(out):
        raise OverflowError(f"gamma diverges at {z!r} (pole at 0)")
    return out
