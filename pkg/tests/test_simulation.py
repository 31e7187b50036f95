import dataclasses
import math

import numpy as np
import pytest

from irsdetect.exceptions import DimensionError, ParameterError
from irsdetect.services.channel import ScatterModel
from irsdetect.services.designs import DesignSpec, build_gain_matrices
from irsdetect.services.detector import DetectorConfig, misdetection_probability
from irsdetect.services.geometry import CartesianPoint, CoverageArea, Direction
from irsdetect.services.irs_model import PhaseShiftVector
from irsdetect.services.simulation import (
    CONFIDENCE_Z,
    _binomial_half_width,
    MdMap,
    ScenarioConfig,
    analytic_md_map,
    build_design,
    design_grid,
    grid_convergence,
    monte_carlo_false_alarm,
    monte_carlo_location_rates,
    monte_carlo_md,
    scattering_sweep,
    sweep_area_sizes,
    worst_case_md,
)


def linear(scenario: ScenarioConfig) -> PhaseShiftVector:
    return build_design(scenario, DesignSpec("linear"))


def single_point(scenario: ScenarioConfig, point: CartesianPoint) -> ScenarioConfig:
    return scenario.with_area(CoverageArea(point, 0.0, 0.0, 1, 1))


def scaled_to_gamma(scenario: ScenarioConfig, gamma: float) -> tuple[ScenarioConfig, PhaseShiftVector]:
    """Single-location scenario whose transmit power yields noncentrality ``gamma``."""
    point = CartesianPoint(-10.0, -50.0, 50.0)
    w = linear(scenario)
    gains = build_gain_matrices([point], scenario.radio, scenario.geom, scenario.ucf_model)
    current = scenario.radio.snr_scale * gains.gains(w)[0]
    radio = dataclasses.replace(scenario.radio, tx_power=scenario.radio.tx_power * gamma / current)
    return single_point(dataclasses.replace(scenario, radio=radio), point), w


class TestScenarioConfig:
    def test_noise_powers_must_agree(self, small):
        with pytest.raises(ParameterError):
            dataclasses.replace(small, detector=DetectorConfig(0.1, small.radio.noise_power * 2))

    def test_with_extent(self, small):
        resized = small.with_extent(4.0)
        assert (resized.area.extent_y, resized.area.extent_z) == (4.0, 4.0)
        assert resized.area.grid_ny == small.area.grid_ny


class TestAnalyticMap:
    def test_shape_and_range(self, small):
        md_map = analytic_md_map(small, linear(small), design="linear1")
        assert md_map.shape == (3, 3)
        assert np.all((md_map.misdetection >= 0) & (md_map.misdetection <= 1))
        assert len(list(md_map.rows())) == 9
        assert md_map.design == "linear1"

    def test_finer_evaluation_grid(self, small):
        fine = dataclasses.replace(small.area, grid_ny=7, grid_nz=5)
        md_map = analytic_md_map(small, linear(small), fine)
        assert md_map.shape == (7, 5)
        assert md_map.y[0] == pytest.approx(-55.0)
        assert md_map.z[-1] == pytest.approx(55.0)

    def test_matched_beam_is_best_at_its_location(self, small, rng):
        target = small.area.center
        scenario = single_point(small, target)
        gains = build_gain_matrices([target], small.radio, small.geom, small.ucf_model)
        a = gains.effective[0]
        matched = PhaseShiftVector(a / np.abs(a))
        best = analytic_md_map(scenario, matched).misdetection[0, 0]
        for _ in range(5):
            other = PhaseShiftVector.from_phases(rng.uniform(-np.pi, np.pi, small.geom.cell_count))
            assert analytic_md_map(scenario, other).misdetection[0, 0] >= best

    def test_null_direction_gives_complement_of_false_alarm(self, small):
        broadside = dataclasses.replace(small.radio, bs_direction=Direction(0.0, 0.0))
        scenario = single_point(dataclasses.replace(small, radio=broadside), CartesianPoint(0.0, 0.0, 50.0))
        u_x, _ = small.geom.cell_indices()
        alternating = PhaseShiftVector.from_phases(np.pi * u_x)
        md_map = analytic_md_map(scenario, alternating)
        assert md_map.gamma[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert md_map.misdetection[0, 0] == pytest.approx(0.9, abs=1e-9)

    def test_dimension_mismatch(self, small):
        with pytest.raises(DimensionError):
            analytic_md_map(small, PhaseShiftVector(np.ones(64)))

    def test_map_validation(self):
        with pytest.raises(ParameterError):
            MdMap(np.zeros(2), np.zeros(2), np.zeros((2, 2)), np.full((2, 2), 1.5))


class TestWorstCase:
    def test_single_point(self, small):
        scenario = single_point(small, CartesianPoint(-10.0, -48.0, 52.0))
        w = linear(small)
        md, location = worst_case_md(scenario, w)
        assert md == pytest.approx(analytic_md_map(scenario, w).misdetection[0, 0])
        assert location == CartesianPoint(-10.0, -48.0, 52.0)

    def test_is_maximum_of_map(self, small):
        w = linear(small)
        md, location = worst_case_md(small, w)
        md_map = analytic_md_map(small, w)
        assert md == pytest.approx(md_map.misdetection.max())
        assert small.area.contains(location)

    def test_device_next_to_the_surface(self, small):
        point = CartesianPoint(-1.0, 0.0, 1.0)
        scenario = single_point(small, point)
        a = build_gain_matrices([point], small.radio, small.geom, small.ucf_model).effective[0]
        w = PhaseShiftVector(a / np.abs(a))
        md_map = analytic_md_map(scenario, w)
        assert md_map.gamma[0, 0] > 1e6
        assert md_map.misdetection[0, 0] == 0.0
        md, _ = worst_case_md(scenario, w)
        assert md == 0.0


class TestSweepAreaSizes:
    def test_single_row(self, small):
        rows = sweep_area_sizes(small, [10.0], [DesignSpec("linear")])
        assert len(rows) == 1
        assert rows[0].design == "linear1"
        assert rows[0].misdetection == pytest.approx(worst_case_md(small, linear(small))[0])
        assert rows[0].half_width == 0.0

    def test_optimized_mean_and_per_draw(self, small):
        spec = DesignSpec("optimized", randomizations=100, seed=2)
        mean_rows = sweep_area_sizes(small, [10.0], [spec], repetitions=4)
        draw_rows = sweep_area_sizes(small, [10.0], [spec], repetitions=4, per_draw=True)
        assert len(mean_rows) == 1
        assert [row.design for row in draw_rows] == [f"optimized#{r}" for r in range(4)]
        assert mean_rows[0].misdetection == pytest.approx(np.mean([row.misdetection for row in draw_rows]))

    def test_needs_sizes(self, small):
        with pytest.raises(ParameterError):
            sweep_area_sizes(small, [], [DesignSpec("linear")])


class TestBuildDesign:
    def test_optimized_is_deterministic(self, small):
        spec = DesignSpec("optimized", randomizations=150, seed=7)
        a = build_design(small, spec)
        b = build_design(small, spec)
        np.testing.assert_array_equal(a.coefficients, b.coefficients)

    def test_defaults_to_scenario_design(self, small):
        np.testing.assert_array_equal(build_design(small).coefficients, linear(small).coefficients)


class TestMonteCarlo:
    def test_zero_trials(self, small):
        with pytest.raises(ParameterError):
            monte_carlo_md(small, linear(small), 0)

    def test_same_seed_same_result(self, small):
        w = linear(small)
        a = monte_carlo_md(small, w, 500, seed=4)
        b = monte_carlo_md(small, w, 500, seed=4)
        assert a == b
        assert a.kind == "empirical"
        assert a.trials == 500

    def test_thread_count_does_not_change_rates(self, small):
        w = linear(small)
        serial = monte_carlo_location_rates(small, w, 300, seed=1, threads=1)
        parallel = monte_carlo_location_rates(small, w, 300, seed=1, threads=3)
        np.testing.assert_array_equal(serial, parallel)
        assert serial.shape == (len(design_grid(small)),)

    def test_rates_span_several_chunks(self, small):
        w = linear(small)
        rates = monte_carlo_location_rates(small, w, 5000, seed=2)
        assert np.all((rates >= 0) & (rates <= 1))

    @pytest.mark.parametrize("gamma", [1.0, 5.0, 6.0, 20.0, 100.0])
    def test_rejection_rate_matches_analytic_value(self, small, gamma):
        scenario, w = scaled_to_gamma(small, gamma)
        expected = misdetection_probability(gamma, scenario.detector.threshold)
        trials = 20_000
        stats = monte_carlo_md(scenario, w, trials, seed=9)
        assert stats.noncentrality == pytest.approx(gamma)
        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs((1 - stats.misdetection) - (1 - expected)) <= 4 * sigma + 1e-12

    def test_noise_only_rejection_rate(self, small):
        stats = monte_carlo_false_alarm(small, 20_000, seed=9)
        expected = 1 - misdetection_probability(0.0, small.detector.threshold)
        sigma = math.sqrt(expected * (1 - expected) / 20_000)
        assert abs(stats.false_alarm - expected) <= 4 * sigma

    @pytest.mark.parametrize("sequence", ["constant", "alternating", "chirp"])
    def test_rates_do_not_depend_on_sync_sequence(self, small, monkeypatch, sequence):
        scenario, w = scaled_to_gamma(small, 6.0)
        n = scenario.radio.sync_length
        phases = {
            "constant": np.zeros(n),
            "alternating": np.pi * np.arange(n),
            "chirp": np.pi * np.arange(n) ** 2 / n,
        }[sequence]
        amplitude = math.sqrt(scenario.radio.tx_power)
        monkeypatch.setattr(
            "irsdetect.services.simulation.synchronization_sequence",
            lambda radio, seed: amplitude * np.exp(1j * phases),
        )
        expected = misdetection_probability(6.0, scenario.detector.threshold)
        trials = 20_000
        stats = monte_carlo_md(scenario, w, trials, seed=9)
        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs(stats.misdetection - expected) <= 4 * sigma

    def test_false_alarm(self, small):
        stats = monte_carlo_false_alarm(small, 20_000, seed=5)
        assert stats.false_alarm == pytest.approx(0.1, abs=0.01)
        assert stats.misdetection == 0.0

    @pytest.mark.parametrize(("rate", "trials"), [(1e-4, 10_000), (0.0, 500), (0.9999, 10_000), (1.0, 50), (0.5, 100)])
    def test_interval_stays_inside_unit_range(self, rate, trials):
        half = _binomial_half_width(rate, trials)
        assert half >= 0.0
        assert rate - half >= 0.0
        assert rate + half <= 1.0 + 1e-12

    def test_interval_near_zero_is_truncated(self):
        assert _binomial_half_width(1e-4, 10_000) == pytest.approx(1e-4)
        assert _binomial_half_width(0.2, 10_000) == pytest.approx(CONFIDENCE_Z * math.sqrt(0.16 / 10_000))

    def test_reported_interval_for_a_strong_link(self, small):
        scenario, w = scaled_to_gamma(small, 100.0)
        stats = monte_carlo_md(scenario, w, 2_000, seed=3)
        assert stats.misdetection - stats.half_width >= 0.0


class TestScatteringSweep:
    def test_zero_scatter_reproduces_los(self, small):
        w = linear(small)
        rows = scattering_sweep(small, w, [0.0], trials=400, seed=6, design="linear1")
        los = monte_carlo_md(small, w, 400, seed=6)
        assert rows[0].misdetection == los.misdetection
        assert rows[0].half_width == los.half_width
        assert rows[0].design == "linear1"

    def test_rows_follow_rho_values(self, small):
        rows = scattering_sweep(small, linear(small), [0.0, 1.0], trials=200, seed=1)
        assert [row.parameter for row in rows] == [0.0, 1.0]

    def test_uses_scenario_path_count(self, small):
        scattered = small.with_scatter(ScatterModel(3, 0.5))
        rows = scattering_sweep(scattered, linear(small), [0.5], trials=200, seed=1)
        direct = monte_carlo_md(scattered, linear(small), 200, seed=1)
        assert rows[0].misdetection == direct.misdetection


class TestGridConvergence:
    def test_refined_grid_contains_the_original(self, small):
        tau, tau_refined, change = grid_convergence(small)
        # more constraints can only lower the max-min optimum
        assert tau_refined <= tau * (1 + 1e-5)
        assert change == pytest.approx(abs(tau - tau_refined) / tau)
