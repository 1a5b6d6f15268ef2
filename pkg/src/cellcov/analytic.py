"""Analytic downlink coverage probability and mean rate under a Poisson field.

Base stations form a homogeneous Poisson process; the user attaches to the
nearest one, every other station interferes, and the serving link fades
exponentially.  Coverage is the CCDF of SINR over positive thresholds, and
mean rate is the expected log(1 + SINR) per unit bandwidth, optionally
thinned by a frequency reuse factor.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

from scipy.special import gammainc  # regularized lower incomplete gamma

from .fading import ExponentialFading, FadingModel, beta_expectation
from .quadrature import DEFAULT_QUAD, QuadSpec, integrate, integrate_semi_infinite
from .specfun import gaussian_q_scaled

__all__ = [
    "NetworkParams",
    "CoverageCurve",
    "RateResult",
    "COVERAGE_METHODS",
    "rho",
    "coverage_general",
    "coverage_exponential",
    "coverage_alpha4",
    "coverage_small_noise",
    "coverage_with_reuse",
    "min_reuse_factor",
    "mean_rate",
    "laplace_interference",
    "coverage_curve",
    "db_to_linear",
]

COVERAGE_METHODS = (
    "thm1_general",
    "thm2_exponential",
    "alpha4_closed",
    "no_noise_closed",
    "small_noise",
    "simulated",
)

# Upper limit of the rate integral over t = ln(1 + SINR); the integrand is
# bounded by 1/(1 + rho(e^t - 1)) which decays at least like exp(-2t/alpha).
_RATE_T_MAX = 46.0


@dataclass(frozen=True)
class NetworkParams:
    """Model parameters shared by every coverage/rate expression.

    density     base stations per km^2
    alpha       path-loss exponent, > 2
    mu          rate of the serving link's exponential fade (mean power 1/mu)
    sigma2      constant noise power; 0 selects the interference-limited regime
    fading      interference power distribution
    """

    density: float = 1.0
    alpha: float = 4.0
    mu: float = 1.0
    sigma2: float = 0.0
    fading: FadingModel = field(default_factory=ExponentialFading)

    def __post_init__(self):
        if not (self.density > 0.0 and math.isfinite(self.density)):
            raise ValueError(f"density must be > 0, got {self.density!r}")
        if not (self.alpha > 2.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be > 2, got {self.alpha!r}")
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be > 0, got {self.mu!r}")
        if not (self.sigma2 >= 0.0 and math.isfinite(self.sigma2)):
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2!r}")
        if not isinstance(self.fading, FadingModel):
            raise ValueError("fading must be a FadingModel")

    @property
    def snr(self) -> float:
        """Received SNR at unit distance, 1/(mu * sigma2)."""
        return math.inf if self.sigma2 == 0.0 else 1.0 / (self.mu * self.sigma2)

    @classmethod
    def from_snr_db(cls, snr_db: float, **kwargs) -> "NetworkParams":
        """Build params with sigma2 derived from an SNR given in dB (inf allowed)."""
        mu = kwargs.get("mu", 1.0)
        sigma2 = 0.0 if math.isinf(snr_db) else 1.0 / (mu * db_to_linear(snr_db))
        return cls(sigma2=sigma2, **kwargs)

    def has_exponential_interference(self) -> bool:
        return isinstance(self.fading, ExponentialFading)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class CoverageCurve:
    """Coverage probabilities over a threshold grid, analytic or simulated."""

    t_db: tuple
    values: tuple
    method: str
    reuse_delta: int = 1
    ci_halfwidths: Optional[tuple] = None
    trials: Optional[int] = None
    resamples: int = 0

    def __post_init__(self):
        if self.method not in COVERAGE_METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.reuse_delta < 1:
            raise ValueError("reuse_delta must be >= 1")
        vals = []
        for v in self.values:
            if not (-1e-9 <= v <= 1.0 + 1e-9):
                raise ValueError(f"coverage value {v!r} outside [0, 1]")
            vals.append(min(max(v, 0.0), 1.0))
        object.__setattr__(self, "t_db", tuple(float(t) for t in self.t_db))
        object.__setattr__(self, "values", tuple(vals))
        if self.ci_halfwidths is not None:
            object.__setattr__(self, "ci_halfwidths", tuple(float(c) for c in self.ci_halfwidths))
        if len(self.t_db) != len(self.values):
            raise ValueError("t_db and values must have equal length")

    @property
    def t_linear(self) -> tuple:
        return tuple(db_to_linear(t) for t in self.t_db)


@dataclass(frozen=True)
class RateResult:
    """Mean rate in nats/s/Hz for a reuse factor and SINR gap."""

    tau: float
    reuse_delta: int = 1
    gap: float = 1.0
    method: str = "analytic_quadrature"
    ci_halfwidth: Optional[float] = None
    trials: Optional[int] = None

    def __post_init__(self):
        if self.tau < 0.0:
            raise ValueError("rate must be nonnegative")
        if self.reuse_delta < 1:
            raise ValueError("reuse_delta must be >= 1")
        if self.gap < 1.0:
            raise ValueError("gap must be >= 1")


@functools.lru_cache(maxsize=1 << 15)
def rho(T: float, alpha: float, spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Exponential-interference integral T^(2/a) * int_{T^(-2/a)}^inf du/(1+u^(a/2)).

    Evaluated as an adaptive finite piece plus an alternating series for the
    power tail, which the rational fold cannot resolve to 1e-9 on its own
    for small alpha.
    """
    if not (T > 0.0 and math.isfinite(T)):
        raise ValueError(f"threshold must be positive, got {T!r}")
    if alpha <= 2.0:
        raise ValueError(f"alpha must be > 2, got {alpha!r}")
    half = alpha / 2.0
    lower = T ** (-2.0 / alpha)
    # Switch to the series where u^(-alpha/2) <= 1e-3: terms shrink by 1e-3.
    switch = 1e3 ** (2.0 / alpha)
    x = max(lower, switch)
    finite = 0.0
    if lower < x:
        finite = integrate(lambda u: 1.0 / (1.0 + u**half), lower, x, spec)
    tail = 0.0
    k = 1
    while True:
        term = (-1.0) ** (k + 1) * x ** (1.0 - k * half) / (k * half - 1.0)
        tail += term
        if abs(term) <= 1e-17 * max(abs(finite + tail), 1e-300) or k > 60:
            break
        k += 1
    return T ** (2.0 / alpha) * (finite + tail)


def _threshold_for_rho(params: NetworkParams, T: float) -> float:
    """Threshold rescaling that absorbs a mismatched interference rate.

    With interference g ~ exp(rate) the Laplace transform at s = mu T r^alpha
    depends on (mu/rate) T only, so the matched-rate integral applies at a
    shifted threshold.
    """
    return T * params.mu / params.fading.rate


def _require_exponential(params: NetworkParams, op: str) -> None:
    if not params.has_exponential_interference():
        raise ValueError(f"{op} requires exponential interference fading, "
                         f"got {params.fading.kind!r}")


def _noise_coefficient(params: NetworkParams, T: float) -> float:
    """Coefficient of w^(alpha/2) after substituting w = pi * density * v."""
    if params.sigma2 == 0.0:
        return 0.0
    return params.mu * T * params.sigma2 / (math.pi * params.density) ** (params.alpha / 2.0)


def _coverage_outer_integral(interference_term: float, noise_coeff: float,
                             alpha: float, spec: QuadSpec) -> float:
    """int_0^inf exp(-w*c - noise_coeff * w^(alpha/2)) dw, c >= 1."""
    if noise_coeff == 0.0:
        return 1.0 / interference_term
    half = alpha / 2.0

    def integrand(w: float) -> float:
        e = w * interference_term
        if e > 745.0:
            return 0.0
        return math.exp(-e - noise_coeff * w**half)

    return integrate_semi_infinite(integrand, 0.0, spec)


def coverage_general(params: NetworkParams, T: float,
                     spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Coverage probability for an arbitrary interference distribution.

    Averages the nearest-station cell-area exponent over the interference
    law and integrates the serving-distance density; reduces to the
    reciprocal of the interference functional when noise vanishes.
    """
    _check_threshold(T)
    beta = beta_expectation(params.fading, T, params.alpha, params.mu, spec)
    return _coverage_outer_integral(beta, _noise_coefficient(params, T), params.alpha, spec)


def coverage_exponential(params: NetworkParams, T: float,
                         spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Coverage probability specialised to exponential interference power."""
    _check_threshold(T)
    _require_exponential(params, "coverage_exponential")
    c = 1.0 + rho(_threshold_for_rho(params, T), params.alpha, spec)
    return _coverage_outer_integral(c, _noise_coefficient(params, T), params.alpha, spec)


def coverage_alpha4(params: NetworkParams, T: float,
                    spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Quasi-closed coverage for path-loss exponent 4 via the Gaussian tail.

    Evaluated through the scaled tail Q(x) e^(x^2/2) so the vanishing-noise
    limit is reached without overflow.  sigma2 = 0 exactly delegates to the
    no-noise closed form.
    """
    _check_threshold(T)
    if params.alpha != 4.0:
        raise ValueError(f"coverage_alpha4 requires alpha = 4, got {params.alpha!r}")
    if params.has_exponential_interference():
        c = 1.0 + rho(_threshold_for_rho(params, T), 4.0, spec)
    else:
        c = beta_expectation(params.fading, T, 4.0, params.mu, spec)
    return _alpha4_tail_form(params, T, c)


def _alpha4_tail_form(params: NetworkParams, T: float, interference_term: float) -> float:
    if params.sigma2 == 0.0:
        return 1.0 / interference_term
    lam = params.density
    b = params.mu * T * params.sigma2
    x = math.pi * lam * interference_term / math.sqrt(2.0 * b)
    return math.pi**1.5 * lam * gaussian_q_scaled(x) / math.sqrt(b)


def coverage_small_noise(params: NetworkParams, T: float,
                         spec: QuadSpec = DEFAULT_QUAD) -> float:
    """First-order low-noise expansion of the coverage probability.

    The correction term is o(sigma2)-accurate; far outside its validity the
    value is clamped into [0, 1] and a warning is emitted.
    """
    _check_threshold(T)
    if params.has_exponential_interference():
        beta = 1.0 + rho(_threshold_for_rho(params, T), params.alpha, spec)
    else:
        beta = beta_expectation(params.fading, T, params.alpha, params.mu, spec)
    lead = 1.0 / beta
    if params.sigma2 == 0.0:
        return lead
    correction = (
        params.mu * T * params.sigma2
        * (params.density * math.pi) ** (-params.alpha / 2.0)
        * math.gamma(1.0 + params.alpha / 2.0)
        * beta ** (-(1.0 + params.alpha / 2.0))
    )
    value = lead - correction
    if not (0.0 <= value <= 1.0):
        warnings.warn(
            "low-noise expansion evaluated outside its validity range; "
            "value clamped to [0, 1]",
            RuntimeWarning,
            stacklevel=2,
        )
        value = min(max(value, 0.0), 1.0)
    return value


def coverage_with_reuse(params: NetworkParams, T: float, delta: int,
                        spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Coverage when each station uses one of ``delta`` random bands.

    Same-band interferers thin to density/delta, scaling the interference
    integral accordingly; noise is unaffected.
    """
    _check_threshold(T)
    _require_exponential(params, "coverage_with_reuse")
    delta = _check_delta(delta)
    c = 1.0 + rho(_threshold_for_rho(params, T), params.alpha, spec) / delta
    return _coverage_outer_integral(c, _noise_coefficient(params, T), params.alpha, spec)


def min_reuse_factor(epsilon: float, T: float, alpha: float,
                     spec: QuadSpec = DEFAULT_QUAD) -> int:
    """Smallest band count keeping no-noise outage at or below ``epsilon``."""
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon!r}")
    _check_threshold(T)
    need = rho(T, alpha, spec) * (1.0 - epsilon) / epsilon
    return max(1, math.ceil(need))


def laplace_interference(params: NetworkParams, r: float, s: float,
                         spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Laplace transform of the shot-noise interference outside radius ``r``.

    The radial integral is reduced in closed form for each interference
    power g (an incomplete-gamma pair), leaving a single expectation over
    the fading law.  Exact for any s >= 0.
    """
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError(f"serving distance must be positive, got {r!r}")
    if s < 0.0:
        raise ValueError(f"transform argument must be >= 0, got {s!r}")
    if s == 0.0:
        return 1.0
    alpha = params.alpha
    a1 = 1.0 - 2.0 / alpha  # in (0, 1)
    gamma_a1 = math.gamma(a1)
    r2 = r * r
    r_neg_alpha = r ** (-alpha)

    def radial_integral(g: float) -> float:
        if g <= 0.0:
            return 0.0
        x = s * g * r_neg_alpha
        shrink = 0.5 * r2 * math.expm1(-x)  # -(r^2/2)(1 - e^-x)
        grow = 0.5 * (s * g) ** (2.0 / alpha) * gamma_a1 * gammainc(a1, x)
        return shrink + grow

    expectation = params.fading.expect(radial_integral, spec)
    return math.exp(-2.0 * math.pi * params.density * expectation)


def mean_rate(params: NetworkParams, delta: int = 1, gap: float = 1.0,
              spec: QuadSpec = DEFAULT_QUAD) -> RateResult:
    """Mean user rate E[ln(1 + SINR/gap)] / delta in nats/s/Hz.

    Integrates the rate CCDF over t = ln(1 + SINR/gap): for each t the
    inner integral is a coverage-type expression at threshold
    gap*(e^t - 1) with the interference integral divided by delta.
    Exponential interference only.
    """
    _require_exponential(params, "mean_rate")
    delta = _check_delta(delta)
    if not (gap >= 1.0 and math.isfinite(gap)):
        raise ValueError(f"gap must be >= 1, got {gap!r}")
    alpha = params.alpha
    rate_scale = params.mu / params.fading.rate
    no_noise = params.sigma2 == 0.0
    inner_spec = QuadSpec(rel_tol=1e-8, abs_tol=1e-13,
                          max_subdivisions=spec.max_subdivisions)

    def integrand(t: float) -> float:
        # Inner coverage-type integral at threshold x = gap * (e^t - 1).
        x = gap * math.expm1(t)
        if x <= 0.0:
            return 1.0
        interference = 1.0 + rho(x * rate_scale, alpha, spec) / delta
        if no_noise:
            return 1.0 / interference
        noise_coeff = params.mu * x * params.sigma2 / (math.pi * params.density) ** (alpha / 2.0)
        return _coverage_outer_integral(interference, noise_coeff, alpha, inner_spec)

    tau = integrate(integrand, 0.0, _RATE_T_MAX, spec) / delta
    method = "analytic_no_noise" if no_noise else "analytic_quadrature"
    return RateResult(tau=tau, reuse_delta=delta, gap=gap, method=method)


def coverage_curve(params: NetworkParams, t_db_grid, method: str = "auto",
                   delta: int = 1, spec: QuadSpec = DEFAULT_QUAD) -> CoverageCurve:
    """Analytic coverage over a dB threshold grid with an explicit method tag."""
    delta = _check_delta(delta)
    chosen = _resolve_method(params, method, delta)
    values = []
    for t_db in t_db_grid:
        T = db_to_linear(t_db)
        if chosen == "no_noise_closed":
            if params.has_exponential_interference():
                c = 1.0 + rho(_threshold_for_rho(params, T), params.alpha, spec) / delta
            else:
                c = beta_expectation(params.fading, T, params.alpha, params.mu, spec)
            values.append(1.0 / c)
        elif chosen == "alpha4_closed":
            if delta == 1:
                values.append(coverage_alpha4(params, T, spec))
            else:
                c = 1.0 + rho(_threshold_for_rho(params, T), 4.0, spec) / delta
                values.append(_alpha4_tail_form(params, T, c))
        elif chosen == "thm2_exponential":
            values.append(coverage_with_reuse(params, T, delta, spec))
        elif chosen == "thm1_general":
            values.append(coverage_general(params, T, spec))
        elif chosen == "small_noise":
            values.append(coverage_small_noise(params, T, spec))
        else:
            raise ValueError(f"cannot build analytic curve with method {chosen!r}")
    return CoverageCurve(t_db=tuple(t_db_grid), values=tuple(values),
                         method=chosen, reuse_delta=delta)


def _resolve_method(params: NetworkParams, method: str, delta: int) -> str:
    exponential = params.has_exponential_interference()
    if delta > 1 and not exponential:
        raise ValueError("frequency reuse analysis requires exponential interference")
    if method == "auto":
        if params.sigma2 == 0.0:
            return "no_noise_closed"
        if params.alpha == 4.0 and (exponential or delta == 1):
            return "alpha4_closed"
        return "thm2_exponential" if exponential else "thm1_general"
    if method not in COVERAGE_METHODS or method == "simulated":
        raise ValueError(f"unknown analytic method {method!r}")
    if method == "alpha4_closed" and params.alpha != 4.0:
        raise ValueError("alpha4_closed requires alpha = 4")
    if method in ("thm2_exponential",) and not exponential:
        raise ValueError("thm2_exponential requires exponential interference")
    if method == "thm1_general" and delta > 1:
        raise ValueError("thm1_general does not support reuse factors > 1")
    return method


def _check_threshold(T: float) -> None:
    if not (T > 0.0 and math.isfinite(T)):
        raise ValueError(f"SINR threshold must be positive, got {T!r}")


def _check_delta(delta) -> int:
    if delta != int(delta) or int(delta) < 1:
        raise ValueError(f"reuse factor must be a positive integer, got {delta!r}")
    return int(delta)
