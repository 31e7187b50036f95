"""Phase-shift configurations: worst-case optimized, tiled linear and quadratic.

All gains are expressed through the effective steering vectors
``a_bar_q = lambda/(4 pi d_r) * lambda/(4 pi d_q) * upsilon_q * a_q`` so that
``|h_q|^2 = |a_bar_q^H w|^2 = w^H A_bar_q w``.
"""

import math
from dataclasses import dataclass, field
from typing import Literal

import cvxpy as cp
import numpy as np

from irsdetect.exceptions import DimensionError, ParameterError, SolverError
from irsdetect.services.channel import RadioConfig
from irsdetect.services.geometry import (
    CartesianPoint,
    CoverageArea,
    IrsGeometry,
    directions_and_distances,
    grid_array,
    wave_vector,
    wave_vectors,
)
from irsdetect.services.irs_model import (
    PhaseShiftVector,
    UnitCellFactorModel,
    steering_matrix,
)
from irsdetect.utils.logging import get_logger

logger = get_logger("designs")

_RANDOMIZATION_BLOCK = 512


@dataclass(frozen=True, eq=False)
class GainMatrixSet:
    """Effective steering vectors of every design-grid location.

    ``effective[q]`` holds ``a_bar_q``; the rank-one matrices
    ``A_bar_q = a_bar_q a_bar_q^H`` are formed only on request.
    """

    effective: np.ndarray = field(repr=False)
    locations: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.effective.ndim != 2 or self.effective.shape[0] != self.locations.shape[0]:
            raise ParameterError("one effective steering vector per location is required")

    @property
    def location_count(self) -> int:
        return self.effective.shape[0]

    @property
    def cell_count(self) -> int:
        return self.effective.shape[1]

    def matrix(self, q: int) -> np.ndarray:
        """Rank-one gain matrix of location ``q``."""
        a = self.effective[q]
        return np.outer(a, a.conj())

    def gains(self, w: PhaseShiftVector | np.ndarray) -> np.ndarray:
        """Channel gains ``w^H A_bar_q w`` for every location.

        ``w`` may also be a (G, U) stack of candidate vectors, giving (G, Q).
        """
        coefficients = w.coefficients if isinstance(w, PhaseShiftVector) else np.asarray(w)
        return np.abs(coefficients @ self.effective.conj().T) ** 2

    def location(self, q: int) -> CartesianPoint:
        x, y, z = self.locations[q]
        return CartesianPoint(float(x), float(y), float(z))


@dataclass(frozen=True, eq=False)
class SdrSolution:
    """Solution of the semidefinite relaxation of the max-min problem."""

    matrix: np.ndarray = field(repr=False)
    tau: float
    upper_bound: float
    duality_gap: float
    iterations: int | None = None
    status: str = "optimal"
    residuals: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class DesignSpec:
    """Which phase-shift design to build and with which parameters."""

    variant: Literal["optimized", "linear", "quadratic"]
    randomizations: int = 3000
    seed: int = 0
    tiles: int = 1

    def __post_init__(self) -> None:
        if self.variant not in ("optimized", "linear", "quadratic"):
            raise ParameterError(f"unknown design variant {self.variant!r}")
        if self.randomizations < 1:
            raise ParameterError("randomizations must be at least 1")
        if self.tiles < 1:
            raise ParameterError("tiles must be at least 1")

    @property
    def label(self) -> str:
        """Short name used in sweep tables, e.g. ``linear4``."""
        if self.variant == "linear":
            return f"linear{self.tiles}"
        return self.variant


def build_gain_matrices(
    grid: list[CartesianPoint],
    radio: RadioConfig,
    geom: IrsGeometry,
    ucf_model: UnitCellFactorModel,
) -> GainMatrixSet:
    """Effective steering vectors for every location of the design grid.

    Raises:
        ParameterError: If the grid is empty.
    """
    if not grid:
        raise ParameterError("the design grid must contain at least one location")
    points = grid_array(grid)
    theta, phi, distance = directions_and_distances(points)
    path_loss = (radio.wavelength / (4 * math.pi * radio.bs_distance)) * (
        radio.wavelength / (4 * math.pi * distance)
    )
    factor = ucf_model.evaluate(theta, radio.bs_direction.theta)
    a = steering_matrix(theta, phi, radio.bs_direction, geom)
    effective = (path_loss * factor)[:, None] * a
    logger.debug(f"Built gain set for {len(grid)} locations and {geom.cell_count} cells")
    return GainMatrixSet(effective=effective, locations=points)


def _solver_options(solver: str) -> dict[str, float]:
    if solver.upper() == "CLARABEL":
        return {"tol_gap_abs": 1e-10, "tol_gap_rel": 1e-10, "tol_feas": 1e-10}
    return {}


def _repair(matrix: np.ndarray) -> np.ndarray:
    """Project onto Hermitian PSD matrices with unit diagonal."""
    hermitian = (matrix + matrix.conj().T) / 2
    evals, evecs = np.linalg.eigh(hermitian)
    evals = np.clip(evals, 0.0, None)
    psd = (evecs * evals) @ evecs.conj().T
    diag = np.sqrt(np.clip(np.real(np.diag(psd)), 1e-300, None))
    repaired = psd / np.outer(diag, diag)
    return (repaired + repaired.conj().T) / 2


def solve_sdr(
    gains: GainMatrixSet,
    tolerance: float = 1e-6,
    solver: str = "CLARABEL",
) -> SdrSolution:
    """Solve the relaxation ``max tau s.t. tau <= tr(A_q W), diag(W) = 1, W >= 0``.

    The gain vectors are normalised before the conic solve. A dual point
    ``diag(mu) >= sum_q lambda_q A_q`` with ``sum(lambda) = 1`` is rebuilt
    from the solver multipliers and gives a certified upper bound.

    Args:
        gains: Effective steering vectors of the design grid.
        tolerance: Accepted relative duality gap.
        solver: cvxpy solver name.

    Returns:
        Relaxed solution with a repaired primal matrix.

    Raises:
        SolverError: If the solver fails or the certified gap exceeds ``tolerance``.
    """
    q_count, u_count = gains.effective.shape
    scale = float(np.max(np.abs(gains.effective)))
    if scale == 0.0:
        raise ParameterError("all gain vectors vanish")
    a = gains.effective / scale

    # tr(A_q W) = sum_ij conj(a_qi) W_ij a_qj, flattened against vec(W) (column-major)
    coefficients = (a.conj()[:, :, None] * a[:, None, :]).transpose(0, 2, 1).reshape(
        q_count, u_count * u_count
    )

    w_var = cp.Variable((u_count, u_count), hermitian=True)
    tau_var = cp.Variable()
    trace_expr = cp.real(coefficients @ cp.vec(w_var, order="F"))
    gain_constraint = trace_expr >= tau_var
    diag_constraint = cp.real(cp.diag(w_var)) == 1
    problem = cp.Problem(
        cp.Maximize(tau_var),
        [gain_constraint, diag_constraint, w_var >> 0],
    )

    logger.info(f"Solving relaxation with {solver}: U={u_count}, Q={q_count}")
    try:
        problem.solve(solver=solver, **_solver_options(solver))
    except cp.SolverError as e:
        raise SolverError(f"conic solver {solver} failed: {e}", status="solver_error") from e

    status = str(problem.status)
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or w_var.value is None:
        raise SolverError("relaxation did not converge", status=status)

    raw = np.asarray(w_var.value)
    raw_evals = np.linalg.eigvalsh((raw + raw.conj().T) / 2)
    residuals = {
        "diagonal": float(np.max(np.abs(np.real(np.diag(raw)) - 1.0))),
        "min_eigenvalue": float(raw_evals[0]),
        "gain": float(max(0.0, tau_var.value - np.min(coefficients @ raw.ravel(order="F")).real)),
    }

    matrix = _repair(raw)
    traces = np.real(np.einsum("qi,ij,qj->q", a.conj(), matrix, a))
    tau_scaled = float(np.min(traces))

    upper_scaled = _dual_bound(a, gain_constraint.dual_value, diag_constraint.dual_value)
    gap = (upper_scaled - tau_scaled) / max(abs(tau_scaled), 1e-300)
    residuals["duality_gap"] = gap
    iterations = problem.solver_stats.num_iters if problem.solver_stats else None

    if gap > tolerance:
        raise SolverError(
            f"relative duality gap {gap:.2e} exceeds tolerance {tolerance:.1e}",
            status=status,
            residuals=residuals,
        )

    tau = tau_scaled * scale**2
    logger.info(
        f"Relaxation solved: tau={tau:.6e}, gap={gap:.2e}, iterations={iterations}"
    )
    return SdrSolution(
        matrix=matrix,
        tau=tau,
        upper_bound=upper_scaled * scale**2,
        duality_gap=gap,
        iterations=iterations,
        status=status,
        residuals=residuals,
    )


def _dual_bound(a: np.ndarray, lam: np.ndarray | None, mu: np.ndarray | None) -> float:
    """Objective of a feasible dual point rebuilt from solver multipliers."""
    u_count = a.shape[1]
    if lam is None:
        return math.inf
    lam = np.clip(np.asarray(lam, dtype=float).ravel(), 0.0, None)
    if lam.sum() == 0.0:
        return math.inf
    lam = lam / lam.sum()
    weighted = a.T @ (lam[:, None] * a.conj())
    mu = np.zeros(u_count) if mu is None else np.real(np.asarray(mu)).ravel()
    if mu.sum() < 0:
        mu = -mu
    slack = np.diag(mu) - weighted
    shift = max(0.0, -float(np.linalg.eigvalsh((slack + slack.conj().T) / 2)[0]))
    return float(np.sum(mu + shift))


def _project_unit_modulus(samples: np.ndarray) -> np.ndarray:
    magnitude = np.abs(samples)
    projected = np.ones_like(samples)
    nonzero = magnitude > 0
    projected[nonzero] = samples[nonzero] / magnitude[nonzero]
    return projected


def randomization_candidates(
    sol: SdrSolution,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw ``count`` samples from CN(0, W) projected to unit modulus.

    Samples are generated one after another from ``rng``, so the first ``n``
    rows of a larger draw equal a draw of size ``n`` from the same state.
    """
    evals, evecs = np.linalg.eigh(sol.matrix)
    factor = evecs * np.sqrt(np.clip(evals, 0.0, None))
    draws = rng.standard_normal((count, factor.shape[0], 2))
    white = (draws[..., 0] + 1j * draws[..., 1]) / math.sqrt(2)
    return _project_unit_modulus(white @ factor.T)


def gaussian_randomization(
    sol: SdrSolution,
    gains: GainMatrixSet,
    randomizations: int,
    rng: np.random.Generator,
) -> PhaseShiftVector:
    """Recover a unit-modulus design from the relaxed solution.

    Args:
        sol: Relaxed solution.
        gains: Gain set used to rank the candidates.
        randomizations: Number of Gaussian draws G.
        rng: Caller-owned random stream.

    Returns:
        The candidate with the largest worst-case gain.
    """
    if randomizations < 1:
        raise ParameterError("randomizations must be at least 1")
    candidates = randomization_candidates(sol, randomizations, rng)
    best_gain = -math.inf
    best_index = 0
    for start in range(0, randomizations, _RANDOMIZATION_BLOCK):
        block = candidates[start:start + _RANDOMIZATION_BLOCK]
        worst = gains.gains(block).min(axis=1)
        index = int(np.argmax(worst))
        if worst[index] > best_gain:
            best_gain = float(worst[index])
            best_index = start + index
    logger.debug(f"Best of {randomizations} draws: min gain {best_gain:.6e} (tau={sol.tau:.6e})")
    return PhaseShiftVector(candidates[best_index])


def optimized_designs(
    sol: SdrSolution,
    gains: GainMatrixSet,
    randomizations: int,
    repetitions: int,
    seed: int,
) -> list[PhaseShiftVector]:
    """Independent randomized designs from one relaxed solution.

    Repetition ``r`` draws from ``default_rng([seed, r])``; repetition 0 is
    the design emitted for a single optimized run with the same seed.
    """
    return [
        gaussian_randomization(sol, gains, randomizations, np.random.default_rng([seed, r]))
        for r in range(repetitions)
    ]


def _gradient_phases(geom: IrsGeometry, gradient_x: np.ndarray, gradient_y: np.ndarray) -> np.ndarray:
    positions = geom.cell_positions()
    return positions[:, 0] * gradient_x + positions[:, 1] * gradient_y


def _slab_centers(area: CoverageArea, tiles: int) -> list[CartesianPoint]:
    c = area.center
    width = area.extent_y / tiles
    return [
        CartesianPoint(c.x, c.y - area.extent_y / 2 + (k + 0.5) * width, c.z)
        for k in range(tiles)
    ]


def linear_tiled_design(
    tiles: int,
    area: CoverageArea,
    radio: RadioConfig,
    geom: IrsGeometry,
) -> PhaseShiftVector:
    """Constant-gradient design per IRS row band.

    IRS tile ``k`` holds rows ``u_y`` in
    ``{k U_y/K - U_y/2 + 1, ..., (k+1) U_y/K - U_y/2}`` and points its beam at
    the center of the ``k``-th equal y-slab of the coverage area.

    Raises:
        ParameterError: If ``tiles`` does not divide ``U_y``.
    """
    if tiles < 1 or geom.u_count_y % tiles:
        raise ParameterError(f"tile count {tiles} must divide U_y={geom.u_count_y}")
    _, u_y = geom.cell_indices()
    rows_per_tile = geom.u_count_y // tiles
    tile_of_cell = (u_y + geom.u_count_y // 2 - 1) // rows_per_tile

    k_r = wave_vector(radio.bs_direction, geom.wavelength)
    gradients = np.empty((tiles, 3))
    for k, center in enumerate(_slab_centers(area, tiles)):
        points = grid_array([center])
        theta, phi, _ = directions_and_distances(points)
        gradients[k] = -(wave_vectors(theta, phi, geom.wavelength)[0] + k_r)

    cell_gradients = gradients[tile_of_cell]
    return PhaseShiftVector.from_phases(
        _gradient_phases(geom, cell_gradients[:, 0], cell_gradients[:, 1])
    )


@dataclass(frozen=True)
class QuadraticCoefficients:
    """Affine gradient ``[alpha_x u_x + beta_x, alpha_y u_y + beta_y]``."""

    alpha_x: float
    alpha_y: float
    beta_x: float
    beta_y: float


def quadratic_coefficients(
    grid: list[CartesianPoint],
    radio: RadioConfig,
    geom: IrsGeometry,
) -> QuadraticCoefficients:
    """Solve the boundary conditions of the quadratic design.

    The gradient equals the elementwise minimum of the per-location target
    gradients at ``(u_x^min, u_y^min)`` and the maximum at ``(u_x^max, u_y^max)``.
    """
    if not grid:
        raise ParameterError("the design grid must contain at least one location")
    theta, phi, _ = directions_and_distances(grid_array(grid))
    targets = -(wave_vectors(theta, phi, geom.wavelength) + wave_vector(radio.bs_direction, geom.wavelength))
    low = targets.min(axis=0)
    high = targets.max(axis=0)
    (x_min, x_max), (y_min, y_max) = geom.index_bounds
    alpha_x = (high[0] - low[0]) / (x_max - x_min)
    alpha_y = (high[1] - low[1]) / (y_max - y_min)
    return QuadraticCoefficients(
        alpha_x=float(alpha_x),
        alpha_y=float(alpha_y),
        beta_x=float(low[0] - alpha_x * x_min),
        beta_y=float(low[1] - alpha_y * y_min),
    )


def quadratic_design(
    grid: list[CartesianPoint],
    radio: RadioConfig,
    geom: IrsGeometry,
) -> PhaseShiftVector:
    """Design whose phase gradient varies linearly across the aperture."""
    coef = quadratic_coefficients(grid, radio, geom)
    u_x, u_y = geom.cell_indices()
    return PhaseShiftVector.from_phases(
        _gradient_phases(
            geom,
            coef.alpha_x * u_x + coef.beta_x,
            coef.alpha_y * u_y + coef.beta_y,
        )
    )


def worst_case_gain(w: PhaseShiftVector, gains: GainMatrixSet) -> tuple[float, CartesianPoint]:
    """Smallest channel gain over the grid and where it occurs.

    Raises:
        DimensionError: If ``w`` does not match the gain vectors.
    """
    if len(w) != gains.cell_count:
        raise DimensionError(
            f"phase-shift vector has {len(w)} entries, gain set has {gains.cell_count} cells"
        )
    values = gains.gains(w)
    q = int(np.argmin(values))
    return float(values[q]), gains.location(q)
