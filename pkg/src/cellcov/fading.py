"""Interference fading/shadowing models and the interference functional.

Interference power g is a dimensionless multiplier of transmit power.  The
desired link always fades exponentially; these models only describe the
interferers, and every analytic expression touches them through a single
expectation E[f(g)] evaluated against the model's density.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import DEFAULT_QUAD, QuadSpec, integrate, integrate_semi_infinite
from .specfun import gamma_neg, upper_incomplete_gamma

__all__ = [
    "FadingModel",
    "ExponentialFading",
    "LognormalDbFading",
    "TabulatedFading",
    "mean_power",
    "normalize_to_mean",
    "sample_power",
    "beta_expectation",
    "load_tabulated_csv",
]

# 10^(x/10) = exp(_DB * x)
_DB = math.log(10.0) / 10.0

# Integration half-range for the standardised Gaussian variable of the
# lognormal expectation; leaves < 1e-15 of the mass outside.
_GAUSS_RANGE = 8.0


class FadingModel:
    """Base class: immutable interference power distributions."""

    kind: str = "abstract"

    def mean_power(self) -> float:
        raise NotImplementedError

    def second_moment(self) -> float:
        raise NotImplementedError

    def normalized_to(self, target_mean: float) -> "FadingModel":
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def expect(self, fn: Callable[[float], float], spec: QuadSpec = DEFAULT_QUAD) -> float:
        """E[fn(g)] against this model's density."""
        raise NotImplementedError


@dataclass(frozen=True)
class ExponentialFading(FadingModel):
    """Exponential interference power (Rayleigh amplitude), mean 1/rate."""

    rate: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"exponential rate must be positive, got {self.rate!r}")

    def mean_power(self) -> float:
        return 1.0 / self.rate

    def second_moment(self) -> float:
        return 2.0 / self.rate**2

    def normalized_to(self, target_mean: float) -> "ExponentialFading":
        _check_target(target_mean)
        return ExponentialFading(rate=1.0 / target_mean)

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size)

    def expect(self, fn, spec: QuadSpec = DEFAULT_QUAD) -> float:
        rate = self.rate

        def weighted(g: float) -> float:
            e = rate * g
            if e > 745.0:
                return 0.0
            return rate * math.exp(-e) * fn(g)

        return integrate_semi_infinite(weighted, 0.0, spec)


@dataclass(frozen=True)
class LognormalDbFading(FadingModel):
    """Power 10^(X/10) with X ~ Normal(mean_db, std_db^2), both in dB."""

    mean_db: float = 0.0
    std_db: float = 6.0
    kind = "lognormal_db"

    def __post_init__(self):
        if not (self.std_db >= 0.0 and math.isfinite(self.std_db)):
            raise ValueError(f"std_db must be >= 0, got {self.std_db!r}")
        if not math.isfinite(self.mean_db):
            raise ValueError("mean_db must be finite")

    def mean_power(self) -> float:
        return math.exp(_DB * self.mean_db + (_DB * self.std_db) ** 2 / 2.0)

    def second_moment(self) -> float:
        return math.exp(2.0 * _DB * self.mean_db + 2.0 * (_DB * self.std_db) ** 2)

    def normalized_to(self, target_mean: float) -> "LognormalDbFading":
        # Only the dB-domain location moves; the spread is part of the model.
        _check_target(target_mean)
        xi = (math.log(target_mean) - (_DB * self.std_db) ** 2 / 2.0) / _DB
        return LognormalDbFading(mean_db=xi, std_db=self.std_db)

    def sample(self, rng, size=None):
        z = rng.standard_normal(size)
        return 10.0 ** ((self.mean_db + self.std_db * z) / 10.0)

    def expect(self, fn, spec: QuadSpec = DEFAULT_QUAD) -> float:
        if self.std_db == 0.0:
            return fn(10.0 ** (self.mean_db / 10.0))
        norm = 1.0 / math.sqrt(2.0 * math.pi)

        def weighted(z: float) -> float:
            g = 10.0 ** ((self.mean_db + self.std_db * z) / 10.0)
            return norm * math.exp(-0.5 * z * z) * fn(g)

        return integrate(weighted, -_GAUSS_RANGE, _GAUSS_RANGE, spec)


@dataclass(frozen=True, eq=False)
class TabulatedFading(FadingModel):
    """Density given at support knots and interpolated linearly between them."""

    power: np.ndarray
    pdf: np.ndarray
    kind = "tabulated"

    def __post_init__(self):
        power = np.asarray(self.power, dtype=float)
        pdf = np.asarray(self.pdf, dtype=float)
        if power.ndim != 1 or power.shape != pdf.shape or power.size < 2:
            raise ValueError("power and pdf must be equal-length 1-D arrays (>= 2 points)")
        if not np.all(np.diff(power) > 0.0):
            raise ValueError("power column must be strictly increasing")
        if power[0] < 0.0:
            raise ValueError("support must be nonnegative")
        if np.any(pdf < 0.0) or not np.all(np.isfinite(pdf)):
            raise ValueError("pdf values must be finite and >= 0")
        total = _trapezoid(pdf, power)
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"pdf must integrate to 1 +- 1e-6 (trapezoid), got {total!r}")
        power.setflags(write=False)
        pdf.setflags(write=False)
        object.__setattr__(self, "power", power)
        object.__setattr__(self, "pdf", pdf)

    def mean_power(self) -> float:
        return _trapezoid(self.power * self.pdf, self.power)

    def second_moment(self) -> float:
        return _trapezoid(self.power**2 * self.pdf, self.power)

    def normalized_to(self, target_mean: float) -> "TabulatedFading":
        _check_target(target_mean)
        mean = self.mean_power()
        if mean <= 0.0:
            raise ValueError("cannot rescale a tabulated model with zero mean")
        s = target_mean / mean
        return TabulatedFading(power=self.power * s, pdf=self.pdf / s)

    def sample(self, rng, size=None):
        # Inverse CDF of the piecewise-linear density: quadratic per segment.
        x, p = self.power, self.pdf
        seg_mass = 0.5 * (p[:-1] + p[1:]) * np.diff(x)
        cdf = np.concatenate([[0.0], np.cumsum(seg_mass)])
        u = rng.random(size) * cdf[-1]
        scalar = np.ndim(u) == 0
        u = np.atleast_1d(u)
        i = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, len(seg_mass) - 1)
        h = np.diff(x)[i]
        p0, p1 = p[i], p[i + 1]
        rem = u - cdf[i]
        slope = (p1 - p0) / h
        with np.errstate(invalid="ignore", divide="ignore"):
            disc = np.sqrt(np.maximum(p0 * p0 + 2.0 * slope * rem, 0.0))
            dx = np.where(np.abs(slope) > 1e-300, (disc - p0) / slope, rem / np.maximum(p0, 1e-300))
        out = x[i] + np.minimum(dx, h)
        return float(out[0]) if scalar else out

    def expect(self, fn, spec: QuadSpec = DEFAULT_QUAD) -> float:
        # Segment-wise adaptive integration; the density is linear within a
        # segment so each piece is as smooth as fn itself.
        x, p = self.power, self.pdf
        seg_spec = QuadSpec(
            rel_tol=spec.rel_tol,
            abs_tol=max(spec.abs_tol / (len(x) - 1), 5e-324),
            max_subdivisions=max(spec.max_subdivisions // (len(x) - 1), 16),
        )
        total = 0.0
        for i in range(len(x) - 1):
            x0, x1 = x[i], x[i + 1]
            p0, p1 = p[i], p[i + 1]
            if p0 == 0.0 and p1 == 0.0:
                continue
            slope = (p1 - p0) / (x1 - x0)
            total += integrate(
                lambda g, x0=x0, p0=p0, slope=slope: (p0 + slope * (g - x0)) * fn(g),
                x0, x1, seg_spec,
            )
        return total


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(np.sum(0.5 * (y[:-1] + y[1:]) * np.diff(x)))


def _check_target(target_mean: float) -> None:
    if not (target_mean > 0.0 and math.isfinite(target_mean)):
        raise ValueError(f"target mean must be positive, got {target_mean!r}")


def mean_power(model: FadingModel) -> float:
    """E[g] for the given interference model."""
    return model.mean_power()


def normalize_to_mean(model: FadingModel, target_mean: float) -> FadingModel:
    """Same-shape model rescaled so that E[g] equals ``target_mean``."""
    return model.normalized_to(target_mean)


def sample_power(model: FadingModel, rng: np.random.Generator, size=None):
    """Draw interference power(s); deterministic given the generator state."""
    return model.sample(rng, size)


def beta_expectation(model: FadingModel, T: float, alpha: float, mu: float,
                     spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Interference functional multiplying the cell-area exponent.

    Evaluates (2 (mu T)^(2/alpha) / alpha) * E[g^(2/alpha) *
    (Gamma(-2/alpha, mu T g) - Gamma(-2/alpha))] by adaptive quadrature over
    the model's density.  Approaches 1 as T -> 0 and equals 1 plus the
    exponential-interference integral when g is exponential with rate mu.
    """
    if alpha <= 2.0:
        raise ValueError(
            f"interference diverges for path-loss exponent {alpha!r} <= 2 (not summable)"
        )
    if not (T > 0.0 and mu > 0.0):
        raise ValueError("T and mu must be positive")
    a = -2.0 / alpha
    gneg = gamma_neg(a)
    prefactor = 2.0 * (mu * T) ** (2.0 / alpha) / alpha
    small_x_limit = (alpha / 2.0) * (mu * T) ** (-2.0 / alpha)

    def kernel(g: float) -> float:
        x = mu * T * g
        if x < 1e-280:
            # g^(2/alpha) * Gamma(-2/alpha, mu T g) tends to the finite
            # limit (alpha/2) (mu T)^(-2/alpha) as g -> 0.
            return small_x_limit
        return g ** (2.0 / alpha) * (upper_incomplete_gamma(a, x) - gneg)

    return prefactor * model.expect(kernel, spec)


def load_tabulated_csv(path) -> TabulatedFading:
    """Read a two-column (power, pdf) CSV with a strictly increasing support.

    Lines starting with '#' are skipped.  Malformed rows raise with their
    1-based line number.
    """
    powers: list[float] = []
    pdfs: list[float] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (row[0].lstrip().startswith("#")):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 2 columns, got {len(row)}")
            try:
                powers.append(float(row[0]))
                pdfs.append(float(row[1]))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: non-numeric value") from exc
    if len(powers) < 2:
        raise ValueError(f"{path}: needs at least 2 data rows")
    return TabulatedFading(power=np.array(powers), pdf=np.array(pdfs))
