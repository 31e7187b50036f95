"""End-to-end checks on the reference scenario. Slow: run with ``-m slow``."""

import dataclasses
import math

import numpy as np
import pytest

from irsdetect.services.designs import DesignSpec, worst_case_gain
from irsdetect.services.detector import misdetection_probability
from irsdetect.services.geometry import CartesianPoint, CoverageArea
from irsdetect.services.irs_model import PhaseShiftVector
from irsdetect.services.simulation import (
    analytic_md_map,
    build_design,
    monte_carlo_md,
    scattering_sweep,
    scenario_gains,
    solve_scenario,
    sweep_area_sizes,
)

pytestmark = pytest.mark.slow

COMPARED = [
    DesignSpec("optimized", randomizations=3000, seed=0),
    DesignSpec("quadratic"),
    DesignSpec("linear", tiles=4),
    DesignSpec("linear", tiles=1),
]


@pytest.fixture(scope="module")
def solution(reference):
    return solve_scenario(reference)


@pytest.fixture(scope="module")
def optimized(reference, solution):
    return build_design(reference, reference.design, solution=solution)


class TestRelaxationBound:
    @pytest.mark.parametrize(
        "spec",
        [DesignSpec("linear"), DesignSpec("linear", tiles=4), DesignSpec("quadratic")],
        ids=lambda spec: spec.label,
    )
    def test_heuristic_designs(self, reference, solution, spec):
        gains, sol = solution
        gain, _ = worst_case_gain(build_design(reference, spec), gains)
        assert gain <= sol.tau * (1 + 1e-6)

    def test_optimized_design(self, solution, optimized):
        gains, sol = solution
        gain, _ = worst_case_gain(optimized, gains)
        assert 0 < gain <= sol.tau * (1 + 1e-6)
        assert sol.duality_gap <= 1e-6


class TestCoverageShape:
    def test_linear_beam_loses_the_corner(self, reference):
        md = analytic_md_map(reference, build_design(reference, DesignSpec("linear"))).misdetection
        assert md[-1, -1] > md[15, 15]

    def test_optimized_improves_the_worst_location(self, reference, optimized):
        linear_md = analytic_md_map(reference, build_design(reference, DesignSpec("linear"))).misdetection
        optimized_md = analytic_md_map(reference, optimized).misdetection
        assert optimized_md.max() < linear_md.max()


class TestDesignComparison:
    def test_ordering_on_large_area(self, reference):
        rows = sweep_area_sizes(reference, [30.0], COMPARED, repetitions=80)
        md = {row.design: row.misdetection for row in rows}
        assert md["optimized"] < md["quadratic"] < md["linear4"] < md["linear1"]

    def test_small_area_agreement(self, reference):
        rows = sweep_area_sizes(reference, [5.0], COMPARED, repetitions=80)
        values = [row.misdetection for row in rows]
        assert max(values) - min(values) <= 0.02


class TestMonteCarloConsistency:
    def test_random_line_of_sight_scenarios(self, reference):
        rng = np.random.default_rng(2024)
        trials = 100_000
        for i in range(10):
            point = CartesianPoint(-10.0, rng.uniform(-65.0, -35.0), rng.uniform(35.0, 65.0))
            w = PhaseShiftVector.from_phases(rng.uniform(-np.pi, np.pi, reference.geom.cell_count))
            scenario = reference.with_area(CoverageArea(point, 0.0, 0.0, 1, 1))

            # rescale the power so the expected rate is well inside (0, 1)
            target = rng.uniform(2.0, 12.0)
            gamma = scenario.radio.snr_scale * float(scenario_gains(scenario).gains(w)[0])
            radio = dataclasses.replace(scenario.radio, tx_power=scenario.radio.tx_power * target / gamma)
            scenario = dataclasses.replace(scenario, radio=radio)

            expected = misdetection_probability(target, scenario.detector.threshold)
            stats = monte_carlo_md(scenario, w, trials, seed=i)
            error = math.sqrt(expected * (1 - expected) / trials)
            assert abs(stats.misdetection - expected) <= max(3 * error, 3 / trials), f"scenario {i}"


class TestScatteringTrend:
    def test_scattering_raises_worst_case_misdetection(self, reference, optimized):
        # coarser evaluation grid for the Monte-Carlo study; the design is unchanged
        coarse = reference.with_area(dataclasses.replace(reference.area, grid_ny=11, grid_nz=11))
        rows = scattering_sweep(
            coarse,
            optimized,
            [0.0, 0.5, 1.0],
            trials=10_000,
            seed=1,
        )
        los, half, full = rows
        assert half.misdetection >= los.misdetection
        assert full.misdetection >= los.misdetection
        assert full.misdetection - full.half_width > los.misdetection + los.half_width
