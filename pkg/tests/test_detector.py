import math
from unittest.mock import PropertyMock, patch

import numpy as np
import pytest
from scipy import integrate, special, stats

from irsdetect.exceptions import ParameterError
from irsdetect.services.detector import (
    DetectionStats,
    DetectorConfig,
    analytical_stats,
    decide,
    glrt_statistic,
    marcum_q1,
    misdetection_probability,
    noncentrality,
    threshold_for,
)
from irsdetect.services.simulation import monte_carlo_false_alarm


def quadrature_cdf(gamma: float, t: float) -> float:
    """Integrate the noncentral chi-squared (2 dof) density on [0, t]."""
    if t == 0:
        return 0.0

    def density(x: float) -> float:
        root = math.sqrt(gamma * x)
        return 0.5 * math.exp(-(x + gamma) / 2 + root) * special.i0e(root)

    value, _ = integrate.quad(density, 0.0, t, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


class TestGlrtStatistic:
    def test_phase_invariance(self, rng):
        s = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        y = np.exp(1j * 0.77) * s
        assert glrt_statistic(y, s, 1.0) == pytest.approx(2 * np.vdot(s, s).real)

    def test_zero_observation(self):
        assert glrt_statistic(np.zeros(4), np.ones(4), 1.0) == 0.0

    def test_hand_example(self):
        assert glrt_statistic(np.array([2, 0]), np.array([1, 1]), 1.0) == pytest.approx(4.0)

    def test_batched(self, rng):
        s = np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
        y = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
        batch = glrt_statistic(y, s, 2.0)
        assert batch.shape == (5,)
        assert batch[3] == pytest.approx(glrt_statistic(y[3], s, 2.0))

    def test_zero_reference(self):
        with pytest.raises(ParameterError):
            glrt_statistic(np.ones(4), np.zeros(4), 1.0)


class TestThreshold:
    def test_reference_false_alarm(self):
        assert threshold_for(0.1) == pytest.approx(4.605170, abs=1e-6)

    def test_one_percent(self):
        assert threshold_for(0.01) == pytest.approx(9.210340, abs=1e-6)

    def test_always_alarm_limit(self):
        assert threshold_for(1 - 1e-12) == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_out_of_range(self, p):
        with pytest.raises(ParameterError):
            threshold_for(p)

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            DetectorConfig(target_false_alarm=1.0)


class TestNoncentrality:
    def test_zero_channel(self, radio):
        assert noncentrality(0j, radio) == 0.0

    def test_quadratic_in_channel(self, radio):
        h = 3e-7 + 1e-7j
        assert noncentrality(2 * h, radio) == pytest.approx(4 * noncentrality(h, radio))

    def test_reference_link_budget(self, radio):
        # 2 * 32 * 16 * 1e-14 * 10^12.3
        assert noncentrality(1e-7, radio) == pytest.approx(20.43, rel=1e-3)


class TestMisdetectionProbability:
    def test_central_case_complements_false_alarm(self):
        assert misdetection_probability(0.0, -2 * math.log(0.1)) == pytest.approx(0.9, abs=1e-12)

    def test_infinite_snr(self):
        assert misdetection_probability(math.inf, 4.6) == 0.0
        assert misdetection_probability(1e4, 4.6) < 1e-12

    def test_zero_threshold(self):
        assert misdetection_probability(5.0, 0.0) == 0.0

    def test_against_quadrature(self):
        assert misdetection_probability(10.0, 4.605170) == pytest.approx(
            quadrature_cdf(10.0, 4.605170), abs=1e-10
        )

    @pytest.mark.parametrize(("gamma", "t"), [(0.5, 1.0), (40.0, 30.0), (150.0, 10.0), (200.0, 50.0)])
    def test_against_scipy(self, gamma, t):
        assert misdetection_probability(gamma, t) == pytest.approx(stats.ncx2.cdf(t, 2, gamma), abs=1e-9)

    @pytest.mark.parametrize("gamma", [1e6, 5e8, 1e9])
    def test_very_large_noncentrality(self, gamma):
        assert misdetection_probability(gamma, -2 * math.log(0.1)) == 0.0

    @pytest.mark.parametrize(("gamma", "t"), [(1e6, 1e6), (1e6, 1.002e6), (2e4, 1.98e4)])
    def test_large_noncentrality_near_the_mean(self, gamma, t):
        assert misdetection_probability(gamma, t) == pytest.approx(stats.ncx2.cdf(t, 2, gamma), abs=1e-6)

    def test_monotone_in_gamma(self):
        values = [misdetection_probability(g, 4.6) for g in np.linspace(0, 60, 25)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_marcum_q_at_zero(self):
        assert marcum_q1(0.0, 2.0) == pytest.approx(math.exp(-2.0))

    def test_negative_arguments(self):
        with pytest.raises(ParameterError):
            misdetection_probability(-1.0, 1.0)

    @pytest.mark.slow
    def test_quadrature_grid(self):
        worst = 0.0
        for gamma in np.linspace(0, 200, 50):
            for t in np.linspace(0, 50, 50):
                error = abs(misdetection_probability(float(gamma), float(t)) - quadrature_cdf(float(gamma), float(t)))
                worst = max(worst, error)
        assert worst <= 1e-8


class TestDecide:
    def test_zero_observation(self):
        assert decide(np.zeros(4), np.ones(4), DetectorConfig()) is False

    def test_strong_signal(self):
        s = np.full(10, 1.0 + 0j)
        assert decide(s, s, DetectorConfig(0.1, 1.0)) is True

    def test_tie_is_not_active(self):
        with patch.object(DetectorConfig, "threshold", new_callable=PropertyMock, return_value=4.0):
            assert decide(np.array([2, 0]), np.array([1, 1]), DetectorConfig()) is False


class TestDetectionStats:
    def test_analytical(self):
        stats_ = analytical_stats(0.0, DetectorConfig(0.1, 1.0))
        assert stats_.misdetection == pytest.approx(0.9)
        assert stats_.kind == "analytical"

    def test_probability_range(self):
        with pytest.raises(ParameterError):
            DetectionStats(false_alarm=0.1, misdetection=1.2, noncentrality=1.0)

    def test_empirical_needs_trials(self):
        with pytest.raises(ParameterError):
            DetectionStats(0.1, 0.2, 1.0, kind="empirical")


class TestCalibration:
    def test_noise_only_statistic_is_central_chi_squared(self, rng):
        s = np.exp(1j * rng.uniform(0, 2 * np.pi, 32))
        noise = (rng.standard_normal((20_000, 32)) + 1j * rng.standard_normal((20_000, 32))) / math.sqrt(2)
        result = stats.kstest(glrt_statistic(noise, s, 1.0), "chi2", args=(2,))
        assert result.pvalue > 1e-3

    def test_active_statistic_is_noncentral(self, rng):
        s = np.exp(1j * rng.uniform(0, 2 * np.pi, 32))
        amplitude = 0.4
        gamma = 2 * amplitude**2 * 32
        noise = (rng.standard_normal((20_000, 32)) + 1j * rng.standard_normal((20_000, 32))) / math.sqrt(2)
        y = amplitude * np.exp(1j * 1.3) * s + noise
        result = stats.kstest(glrt_statistic(y, s, 1.0), "ncx2", args=(2, gamma))
        assert result.pvalue > 1e-3

    def test_false_alarm_rate(self, reference):
        result = monte_carlo_false_alarm(reference, 100_000, seed=11)
        assert result.kind == "empirical"
        assert result.false_alarm == pytest.approx(0.1, abs=0.003)
        assert result.half_width == pytest.approx(1.96 * math.sqrt(0.09 / 100_000), rel=0.05)
