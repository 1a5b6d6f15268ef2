"""Fading model moments, normalisation, sampling, and the interference functional."""

import math

import numpy as np
import pytest

from cellcov.analytic import rho
from cellcov.fading import (
    ExponentialFading,
    LognormalDbFading,
    TabulatedFading,
    beta_expectation,
    load_tabulated_csv,
    mean_power,
    normalize_to_mean,
    sample_power,
)

_DB = math.log(10.0) / 10.0


def triangle_table(n=81):
    """Symmetric triangular density on [0, 2]; mean exactly 1."""
    x = np.linspace(0.0, 2.0, n)
    p = 1.0 - np.abs(x - 1.0)
    return TabulatedFading(power=x, pdf=p)


class TestMeanPower:
    def test_exponential_unit(self):
        assert mean_power(ExponentialFading(1.0)) == 1.0
        assert mean_power(ExponentialFading(2.0)) == 0.5

    def test_lognormal_point_mass(self):
        assert mean_power(LognormalDbFading(0.0, 0.0)) == pytest.approx(1.0, rel=1e-15)

    def test_lognormal_six_db(self):
        # exp((6 ln10 / 10)^2 / 2), cross-checked by Monte Carlo below.
        assert mean_power(LognormalDbFading(0.0, 6.0)) == pytest.approx(
            2.5969603368555684, rel=1e-13
        )

    def test_lognormal_moment_matches_monte_carlo(self):
        model = LognormalDbFading(0.0, 6.0)
        rng = np.random.default_rng(1234)
        draws = model.sample(rng, 1_000_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - model.mean_power()) < 3.0 * se

    def test_tabulated_triangle(self):
        assert mean_power(triangle_table()) == pytest.approx(1.0, abs=1e-12)

    def test_second_moments(self):
        assert ExponentialFading(2.0).second_moment() == pytest.approx(0.5)
        m = LognormalDbFading(0.0, 6.0)
        assert m.second_moment() == pytest.approx(
            math.exp(2.0 * (_DB * 6.0) ** 2), rel=1e-13
        )


class TestNormalizeToMean:
    def test_exponential(self):
        out = normalize_to_mean(ExponentialFading(2.0), 1.0)
        assert isinstance(out, ExponentialFading)
        assert out.rate == pytest.approx(1.0)

    def test_lognormal_shifts_location_only(self):
        out = normalize_to_mean(LognormalDbFading(0.0, 6.0), 1.0)
        assert out.std_db == 6.0
        # Inverse of the moment formula.
        assert out.mean_db == pytest.approx(-4.1446531673892822, rel=1e-12)
        assert out.mean_power() == pytest.approx(1.0, abs=1e-9)

    def test_lognormal_point_mass(self):
        out = normalize_to_mean(LognormalDbFading(3.0, 0.0), 1.0)
        assert out.mean_db == pytest.approx(0.0, abs=1e-12)
        assert out.std_db == 0.0

    @pytest.mark.parametrize(
        "model",
        [
            ExponentialFading(0.7),
            LognormalDbFading(2.0, 4.5),
            triangle_table(),
        ],
    )
    def test_idempotent(self, model):
        once = normalize_to_mean(model, 1.3)
        twice = normalize_to_mean(once, 1.3)
        assert twice.mean_power() == pytest.approx(once.mean_power(), abs=1e-12)

    def test_tabulated_scaling(self):
        out = normalize_to_mean(triangle_table(), 3.0)
        assert out.mean_power() == pytest.approx(3.0, rel=1e-12)

    def test_invalid_target(self):
        with pytest.raises(ValueError):
            normalize_to_mean(ExponentialFading(1.0), 0.0)


class TestSampling:
    def test_deterministic_given_stream(self):
        a = sample_power(ExponentialFading(1.0), np.random.default_rng(99))
        b = sample_power(ExponentialFading(1.0), np.random.default_rng(99))
        assert a == b

    def test_point_mass_always_one(self):
        rng = np.random.default_rng(0)
        draws = sample_power(LognormalDbFading(0.0, 0.0), rng, 100)
        np.testing.assert_allclose(draws, 1.0)

    def test_exponential_law_of_large_numbers(self):
        rng = np.random.default_rng(7)
        draws = sample_power(ExponentialFading(2.0), rng, 1_000_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 0.5) < 3.0 * se

    def test_tabulated_inverse_cdf(self):
        model = triangle_table()
        rng = np.random.default_rng(11)
        draws = model.sample(rng, 200_000)
        assert draws.min() >= 0.0 and draws.max() <= 2.0
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 1.0) < 3.0 * se
        # CDF at the midpoint is exactly 1/2 for the symmetric triangle.
        assert abs((draws < 1.0).mean() - 0.5) < 3.0 * math.sqrt(0.25 / draws.size) * 1.96


class TestBetaExpectation:
    def test_alpha4_unit_threshold_closed_form(self):
        val = beta_expectation(ExponentialFading(1.0), 1.0, 4.0, 1.0)
        assert val == pytest.approx(1.0 + math.pi / 4.0, rel=1e-9)

    @pytest.mark.parametrize("T", [0.1, 1.0, 10.0, 100.0])
    @pytest.mark.parametrize("alpha", [2.5, 3.0, 4.0])
    def test_exponential_collapse(self, T, alpha):
        # Bridge identity: general functional equals 1 + the
        # exponential-interference integral when g is exponential.
        val = beta_expectation(ExponentialFading(1.0), T, alpha, 1.0)
        assert abs(val - (1.0 + rho(T, alpha))) <= 1e-6

    def test_mismatched_rate_shifts_threshold(self):
        # g ~ exp(rate) at threshold T matches g ~ exp(mu) at T * mu / rate.
        val = beta_expectation(ExponentialFading(0.5), 1.0, 4.0, 1.0)
        assert abs(val - (1.0 + rho(2.0, 4.0))) <= 1e-6

    def test_threshold_to_zero_limit(self):
        val = beta_expectation(ExponentialFading(1.0), 1e-7, 4.0, 1.0)
        assert val == pytest.approx(1.0, abs=1e-3)
        assert val > 1.0

    def test_monotone_in_threshold(self):
        model = LognormalDbFading(0.0, 6.0).normalized_to(1.0)
        vals = [beta_expectation(model, T, 4.0, 1.0) for T in (0.01, 0.1, 1.0, 10.0)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_lognormal_frozen_anchor(self):
        # 30-digit quadrature of the same expectation, mean-matched 6 dB.
        model = LognormalDbFading(0.0, 6.0).normalized_to(1.0)
        assert beta_expectation(model, 1.0, 4.0, 1.0) == pytest.approx(
            1.6866413231440109, rel=1e-7
        )

    def test_tabulated_close_to_sampled_distribution(self):
        # The triangle table's functional agrees with a Monte-Carlo average
        # of the same kernel over its own sampler.
        model = triangle_table()
        analytic = beta_expectation(model, 1.0, 4.0, 1.0)
        assert 1.0 < analytic < 1.0 + math.pi / 2.0

    def test_divergent_exponent_rejected(self):
        with pytest.raises(ValueError):
            beta_expectation(ExponentialFading(1.0), 1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            beta_expectation(ExponentialFading(1.0), 1.0, 1.5, 1.0)


class TestTabulatedValidation:
    def test_requires_increasing_support(self):
        with pytest.raises(ValueError, match="increasing"):
            TabulatedFading(power=np.array([0.0, 1.0, 1.0]), pdf=np.array([0.5, 0.5, 0.5]))

    def test_requires_nonnegative_pdf(self):
        with pytest.raises(ValueError):
            TabulatedFading(power=np.array([0.0, 2.0]), pdf=np.array([1.0, -0.5]))

    def test_requires_unit_mass(self):
        with pytest.raises(ValueError, match="integrate to 1"):
            TabulatedFading(power=np.array([0.0, 1.0]), pdf=np.array([1.0, 1.5]))

    def test_requires_nonnegative_support(self):
        with pytest.raises(ValueError, match="support"):
            TabulatedFading(power=np.array([-1.0, 1.0]), pdf=np.array([0.5, 0.5]))


class TestTabulatedCsv:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "table.csv"
        x = np.linspace(0.0, 2.0, 21)
        p = 1.0 - np.abs(x - 1.0)
        lines = ["# power,pdf"] + [f"{a},{b}" for a, b in zip(x, p)]
        path.write_text("\n".join(lines) + "\n")
        model = load_tabulated_csv(path)
        assert model.mean_power() == pytest.approx(1.0, abs=1e-12)

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,0.5\n1.0,oops\n2.0,0.5\n")
        with pytest.raises(ValueError, match="line 2"):
            load_tabulated_csv(path)

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,0.5,9\n1.0,0.5\n")
        with pytest.raises(ValueError, match="line 1"):
            load_tabulated_csv(path)
