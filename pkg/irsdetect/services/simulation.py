"""Experiment harness: misdetection maps, design comparisons and scattering studies."""

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from irsdetect.exceptions import ParameterError
from irsdetect.services.channel import (
    RadioConfig,
    ScatterModel,
    device_irs_los,
    irs_bs_channel,
    path_responses,
    sample_scattered_paths_batch,
)
from irsdetect.services.designs import (
    DesignSpec,
    GainMatrixSet,
    SdrSolution,
    build_gain_matrices,
    gaussian_randomization,
    linear_tiled_design,
    optimized_designs,
    quadratic_design,
    solve_sdr,
)
from irsdetect.services.detector import (
    DetectionStats,
    DetectorConfig,
    glrt_statistic,
    misdetection_probability,
)
from irsdetect.services.geometry import (
    CartesianPoint,
    CoverageArea,
    IrsGeometry,
    axis_samples,
    coverage_grid,
)
from irsdetect.services.irs_model import PhaseShiftVector, UnitCellFactorModel, check_length
from irsdetect.utils.logging import get_logger

logger = get_logger("simulation")

CONFIDENCE_Z = 1.959963984540054
DEFAULT_RHO_VALUES = (0.0, 0.5, 1.0, 2.0)
DEFAULT_SCATTER_PATHS = 5
_NOISE_ONLY_STREAM = 2**32 - 1
_TRIAL_CHUNK = 4096


@dataclass(frozen=True)
class NoiseComposition:
    """Noise power as PSD times bandwidth times noise figure (linear units)."""

    psd: float
    bandwidth: float
    noise_figure: float

    @property
    def noise_power(self) -> float:
        return self.psd * self.bandwidth * self.noise_figure


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one experiment."""

    geom: IrsGeometry
    area: CoverageArea
    radio: RadioConfig
    detector: DetectorConfig
    design: DesignSpec
    scatter: ScatterModel = field(default_factory=ScatterModel)
    ucf_model: UnitCellFactorModel = field(default_factory=UnitCellFactorModel)
    master_seed: int = 0
    noise: NoiseComposition | None = None

    def __post_init__(self) -> None:
        if not math.isclose(self.detector.noise_power, self.radio.noise_power, rel_tol=1e-12):
            raise ParameterError("detector and radio noise powers disagree")
        if self.master_seed < 0:
            raise ParameterError("master_seed must be nonnegative")
        if not math.isclose(self.geom.wavelength, self.radio.wavelength, rel_tol=1e-12):
            raise ParameterError("IRS and radio wavelengths disagree")

    def with_area(self, area: CoverageArea) -> "ScenarioConfig":
        return dataclasses.replace(self, area=area)

    def with_scatter(self, scatter: ScatterModel) -> "ScenarioConfig":
        return dataclasses.replace(self, scatter=scatter)

    def with_extent(self, size: float) -> "ScenarioConfig":
        """Same scenario with a square coverage area of side ``size``."""
        return self.with_area(dataclasses.replace(self.area, extent_y=size, extent_z=size))


@dataclass(frozen=True, eq=False)
class MdMap:
    """Analytical misdetection probability over an evaluation grid."""

    y: np.ndarray
    z: np.ndarray
    gamma: np.ndarray
    misdetection: np.ndarray
    design: str = ""

    def __post_init__(self) -> None:
        expected = (self.y.size, self.z.size)
        if self.gamma.shape != expected or self.misdetection.shape != expected:
            raise ParameterError(f"map values must have shape {expected}")
        if np.any((self.misdetection < 0) | (self.misdetection > 1)):
            raise ParameterError("misdetection probabilities must lie in [0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.y.size, self.z.size

    def rows(self):
        """Yield ``(y, z, gamma, md)`` in row-major grid order."""
        for i, y in enumerate(self.y):
            for j, z in enumerate(self.z):
                yield float(y), float(z), float(self.gamma[i, j]), float(self.misdetection[i, j])


@dataclass(frozen=True)
class SweepRow:
    """One row of a design-comparison or scattering table."""

    parameter: float
    design: str
    misdetection: float
    half_width: float = 0.0


def design_grid(scenario: ScenarioConfig) -> list[CartesianPoint]:
    """Locations entering the worst-case design."""
    return coverage_grid(scenario.area)


def scenario_gains(scenario: ScenarioConfig, grid: list[CartesianPoint] | None = None) -> GainMatrixSet:
    """Gain set of a scenario over ``grid``.

    Args:
        scenario: Scenario supplying radio, IRS and unit-cell factor.
        grid: Locations to evaluate; defaults to the design grid.

    Returns:
        Effective steering vectors, one per location.
    """
    return build_gain_matrices(
        grid if grid is not None else design_grid(scenario),
        scenario.radio,
        scenario.geom,
        scenario.ucf_model,
    )


def solve_scenario(scenario: ScenarioConfig, tolerance: float = 1e-6, solver: str = "CLARABEL") -> tuple[GainMatrixSet, SdrSolution]:
    """Gain set and relaxed solution of a scenario's design grid."""
    gains = scenario_gains(scenario)
    return gains, solve_sdr(gains, tolerance=tolerance, solver=solver)


def build_design(
    scenario: ScenarioConfig,
    spec: DesignSpec | None = None,
    *,
    solution: tuple[GainMatrixSet, SdrSolution] | None = None,
    tolerance: float = 1e-6,
    solver: str = "CLARABEL",
) -> PhaseShiftVector:
    """Build the phase-shift design described by ``spec`` (default: the scenario's)."""
    spec = spec or scenario.design
    if spec.variant == "linear":
        return linear_tiled_design(spec.tiles, scenario.area, scenario.radio, scenario.geom)
    if spec.variant == "quadratic":
        return quadratic_design(design_grid(scenario), scenario.radio, scenario.geom)
    gains, sol = solution or solve_scenario(scenario, tolerance, solver)
    return gaussian_randomization(sol, gains, spec.randomizations, np.random.default_rng([spec.seed, 0]))


def analytic_md_map(
    scenario: ScenarioConfig,
    w: PhaseShiftVector,
    eval_area: CoverageArea | None = None,
    design: str = "",
) -> MdMap:
    """LoS misdetection probability at every point of an evaluation grid.

    The evaluation grid defaults to the scenario's design grid but may be
    finer or larger.
    """
    check_length(w, scenario.geom)
    area = eval_area or scenario.area
    gains = scenario_gains(scenario, coverage_grid(area))
    gamma = scenario.radio.snr_scale * gains.gains(w)
    t = scenario.detector.threshold
    md = np.array([misdetection_probability(float(g), t) for g in gamma])
    shape = (area.grid_ny, area.grid_nz)
    return MdMap(
        y=axis_samples(area.center.y, area.extent_y, area.grid_ny),
        z=axis_samples(area.center.z, area.extent_z, area.grid_nz),
        gamma=gamma.reshape(shape),
        misdetection=md.reshape(shape),
        design=design,
    )


def worst_case_md(
    scenario: ScenarioConfig,
    w: PhaseShiftVector,
    gains: GainMatrixSet | None = None,
) -> tuple[float, CartesianPoint]:
    """Largest LoS misdetection probability over the design grid.

    Misdetection decreases monotonically in the noncentrality, so the
    worst location is the one with the smallest channel gain.
    """
    check_length(w, scenario.geom)
    gains = gains or scenario_gains(scenario)
    values = gains.gains(w)
    q = int(np.argmin(values))
    gamma = scenario.radio.snr_scale * float(values[q])
    return misdetection_probability(gamma, scenario.detector.threshold), gains.location(q)


def _mean_with_ci(values: list[float]) -> tuple[float, float]:
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    half = CONFIDENCE_Z * float(np.std(values, ddof=1)) / math.sqrt(len(values))
    return mean, half


def sweep_area_sizes(
    scenario: ScenarioConfig,
    sizes: list[float],
    designs: list[DesignSpec],
    *,
    repetitions: int = 80,
    per_draw: bool = False,
    trials: int | None = None,
    seed: int | None = None,
    threads: int = 1,
    tolerance: float = 1e-6,
    solver: str = "CLARABEL",
) -> list[SweepRow]:
    """Worst-case misdetection of each design over square areas of each size.

    Optimized designs report the mean over ``repetitions`` randomized designs
    (or one row per draw with ``per_draw``). With ``trials`` the rows come from
    Monte-Carlo evaluation instead; optimized designs then use the first draw.
    """
    if not sizes:
        raise ParameterError("at least one area size is required")
    rows: list[SweepRow] = []
    for size in sizes:
        sized = scenario.with_extent(size)
        gains = scenario_gains(sized)
        solution: tuple[GainMatrixSet, SdrSolution] | None = None
        for spec in designs:
            if spec.variant == "optimized":
                if solution is None:
                    solution = (gains, solve_sdr(gains, tolerance=tolerance, solver=solver))
                count = 1 if trials else repetitions
                candidates = optimized_designs(solution[1], gains, spec.randomizations, count, spec.seed)
            else:
                candidates = [build_design(sized, spec)]

            if trials:
                stats = monte_carlo_md(sized, candidates[0], trials, seed=seed, threads=threads)
                rows.append(SweepRow(size, spec.label, stats.misdetection, stats.half_width or 0.0))
            else:
                values = [worst_case_md(sized, w, gains)[0] for w in candidates]
                if per_draw and len(values) > 1:
                    rows.extend(SweepRow(size, f"{spec.label}#{r}", v) for r, v in enumerate(values))
                else:
                    mean, half = _mean_with_ci(values)
                    rows.append(SweepRow(size, spec.label, mean, half))
            logger.info(f"size={size:g} design={spec.label} md={rows[-1].misdetection:.6f}")
    return rows


def synchronization_sequence(radio: RadioConfig, seed: int) -> np.ndarray:
    """Seeded unit-modulus sequence scaled to the per-symbol transmit power."""
    rng = np.random.default_rng([seed, 0x5EED])
    phases = rng.uniform(-np.pi, np.pi, radio.sync_length)
    return math.sqrt(radio.tx_power) * np.exp(1j * phases)


def _binomial_half_width(rate: float, trials: int) -> float:
    half = CONFIDENCE_Z * math.sqrt(rate * (1.0 - rate) / trials)
    return min(half, rate, 1.0 - rate)


def _location_streams(seed: int, q: int) -> tuple[np.random.Generator, np.random.Generator]:
    noise_seq, scatter_seq = np.random.SeedSequence([seed, q]).spawn(2)
    return np.random.default_rng(noise_seq), np.random.default_rng(scatter_seq)


def _complex_noise(rng: np.random.Generator, shape: tuple[int, ...], power: float) -> np.ndarray:
    draws = rng.standard_normal(shape + (2,))
    return math.sqrt(power / 2) * (draws[..., 0] + 1j * draws[..., 1])


def _location_misdetections(
    scenario: ScenarioConfig,
    w: PhaseShiftVector,
    point: CartesianPoint,
    q: int,
    trials: int,
    seed: int,
    x: np.ndarray,
) -> int:
    radio = scenario.radio
    noise_rng, scatter_rng = _location_streams(seed, q)

    los = device_irs_los(point, radio.wavelength)
    coefficient, direction = los
    g_los = path_responses(
        np.array([direction.theta]), np.array([direction.phi]), w, radio, scenario.geom, scenario.ucf_model
    )[0]
    h_r = irs_bs_channel(radio)

    misdetections = 0
    for start in range(0, trials, _TRIAL_CHUNK):
        size = min(_TRIAL_CHUNK, trials - start)
        field_sum = np.full(size, g_los * coefficient, dtype=complex)
        if scenario.scatter.path_count > 1:
            nlos, theta, phi = sample_scattered_paths_batch(los, scenario.scatter, scatter_rng, size)
            g_nlos = path_responses(theta, phi, w, radio, scenario.geom, scenario.ucf_model)
            field_sum = field_sum + np.sum(g_nlos * nlos, axis=1)
        h = h_r * field_sum

        # y = s e^{j arg h} + z with s = sqrt(M) |h| x
        signal = math.sqrt(radio.bs_antennas) * h[:, None] * x[None, :]
        y = signal + _complex_noise(noise_rng, (size, radio.sync_length), radio.noise_power)
        statistic = glrt_statistic(y, x, radio.noise_power)
        misdetections += int(np.count_nonzero(statistic <= scenario.detector.threshold))
    return misdetections


def monte_carlo_location_rates(
    scenario: ScenarioConfig,
    w: PhaseShiftVector,
    trials: int,
    *,
    seed: int | None = None,
    grid: list[CartesianPoint] | None = None,
    threads: int = 1,
) -> np.ndarray:
    """Empirical misdetection rate at every grid location.

    Location ``q`` draws from ``SeedSequence([seed, q])``, so results do not
    depend on the thread count or evaluation order.
    """
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    check_length(w, scenario.geom)
    seed = scenario.master_seed if seed is None else seed
    points = grid if grid is not None else design_grid(scenario)
    x = synchronization_sequence(scenario.radio, seed)

    def run(q: int) -> int:
        count = _location_misdetections(scenario, w, points[q], q, trials, seed, x)
        logger.debug(f"location {q}: {count}/{trials} misdetections")
        return count

    with ThreadPoolExecutor(max_workers=threads) as executor:
        counts = list(executor.map(run, range(len(points))))
    return np.array(counts, dtype=float) / trials


def monte_carlo_md(
    scenario: ScenarioConfig,
    w: PhaseShiftVector,
    trials: int,
    *,
    seed: int | None = None,
    grid: list[CartesianPoint] | None = None,
    threads: int = 1,
) -> DetectionStats:
    """Worst-case empirical misdetection rate over the grid.

    Raises:
        ParameterError: If ``trials`` is zero.
    """
    rates = monte_carlo_location_rates(scenario, w, trials, seed=seed, grid=grid, threads=threads)
    q = int(np.argmax(rates))
    points = grid if grid is not None else design_grid(scenario)
    gains = scenario_gains(scenario, [points[q]])
    gamma = scenario.radio.snr_scale * float(gains.gains(w)[0])
    rate = float(rates[q])
    return DetectionStats(
        false_alarm=scenario.detector.target_false_alarm,
        misdetection=rate,
        noncentrality=gamma,
        kind="empirical",
        trials=trials,
        half_width=_binomial_half_width(rate, trials),
    )


def monte_carlo_false_alarm(
    scenario: ScenarioConfig,
    trials: int,
    *,
    seed: int | None = None,
) -> DetectionStats:
    """Empirical alarm rate on noise-only observations."""
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    seed = scenario.master_seed if seed is None else seed
    radio = scenario.radio
    x = synchronization_sequence(radio, seed)
    noise_rng, _ = _location_streams(seed, _NOISE_ONLY_STREAM)
    y = _complex_noise(noise_rng, (trials, radio.sync_length), radio.noise_power)
    alarms = int(np.count_nonzero(glrt_statistic(y, x, radio.noise_power) > scenario.detector.threshold))
    rate = alarms / trials
    return DetectionStats(
        false_alarm=rate,
        misdetection=0.0,
        noncentrality=0.0,
        kind="empirical",
        trials=trials,
        half_width=_binomial_half_width(rate, trials),
    )


def scattering_sweep(
    scenario: ScenarioConfig,
    w: PhaseShiftVector,
    rho_values: list[float] | tuple[float, ...] = DEFAULT_RHO_VALUES,
    trials: int = 10_000,
    *,
    seed: int | None = None,
    threads: int = 1,
    design: str = "",
) -> list[SweepRow]:
    """Monte-Carlo worst-case misdetection for several scattered-power ratios.

    Uses the scenario's path count when it has scattered paths and five
    paths otherwise. The noise stream is independent of the scatter stream,
    so the ``rho = 0`` row reproduces the LoS-only Monte-Carlo result exactly.
    """
    paths = scenario.scatter.path_count if scenario.scatter.path_count > 1 else DEFAULT_SCATTER_PATHS
    rows = []
    for rho in rho_values:
        scatter = ScatterModel(paths, rho, scenario.scatter.direction_stddev)
        stats = monte_carlo_md(scenario.with_scatter(scatter), w, trials, seed=seed, threads=threads)
        rows.append(SweepRow(float(rho), design, stats.misdetection, stats.half_width or 0.0))
        logger.info(f"rho={rho:g} md={stats.misdetection:.6f} +/- {stats.half_width:.6f}")
    return rows


def grid_convergence(
    scenario: ScenarioConfig,
    tolerance: float = 1e-6,
    solver: str = "CLARABEL",
) -> tuple[float, float, float]:
    """Relaxation optimum on the design grid and on a refined grid.

    The refined grid uses ``2n - 1`` samples per axis so it contains every
    original location.

    Returns:
        ``(tau, tau_refined, relative_change)``.
    """
    area = scenario.area
    refined = dataclasses.replace(
        area,
        grid_ny=max(2 * area.grid_ny - 1, 1),
        grid_nz=max(2 * area.grid_nz - 1, 1),
    )
    _, coarse = solve_scenario(scenario, tolerance, solver)
    _, fine = solve_scenario(scenario.with_area(refined), tolerance, solver)
    change = abs(coarse.tau - fine.tau) / coarse.tau
    logger.info(f"Grid convergence: tau={coarse.tau:.6e} refined={fine.tau:.6e} change={change:.3%}")
    return coarse.tau, fine.tau, change
