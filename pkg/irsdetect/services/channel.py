"""IRS-BS and device-IRS channels and the end-to-end channel."""

import math
from dataclasses import dataclass, field

import numpy as np

from irsdetect.exceptions import ParameterError
from irsdetect.services.geometry import (
    CartesianPoint,
    Direction,
    IrsGeometry,
    direction_and_distance,
)
from irsdetect.services.irs_model import (
    PhaseShiftVector,
    UnitCellFactorModel,
    check_length,
    steering_matrix,
)
from irsdetect.utils.logging import get_logger

logger = get_logger("channel")


@dataclass(frozen=True)
class RadioConfig:
    """Link budget and BS placement."""

    wavelength: float
    bs_distance: float
    bs_direction: Direction
    bs_antennas: int
    tx_power: float
    noise_power: float
    sync_length: int

    def __post_init__(self) -> None:
        for name in ("wavelength", "bs_distance", "tx_power", "noise_power"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be strictly positive")
        if self.bs_antennas < 1:
            raise ParameterError("bs_antennas must be at least 1")
        if self.sync_length <= 1:
            raise ParameterError("sync_length must exceed 1 for the GLRT statistic")

    @property
    def snr_scale(self) -> float:
        """Factor ``2 S M P_x / sigma_n^2`` mapping ``|h|^2`` to noncentrality."""
        return 2.0 * self.sync_length * self.bs_antennas * self.tx_power / self.noise_power


@dataclass(frozen=True)
class ScatterModel:
    """Scattered paths in the device-IRS link."""

    path_count: int = 1
    power_ratio: float = 0.0
    direction_stddev: float = 0.1

    def __post_init__(self) -> None:
        if self.path_count < 1:
            raise ParameterError("path_count must be at least 1")
        if self.power_ratio < 0:
            raise ParameterError("power_ratio must be nonnegative")
        if self.path_count == 1 and self.power_ratio != 0:
            raise ParameterError("a single-path model cannot carry scattered power")
        if self.direction_stddev < 0:
            raise ParameterError("direction_stddev must be nonnegative")

    @property
    def path_power_fraction(self) -> float:
        """Power of each scattered path relative to the LoS path."""
        if self.path_count == 1:
            return 0.0
        return self.power_ratio / (self.path_count - 1)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """LoS path plus ``L - 1`` scattered paths of one device location."""

    los_coefficient: complex
    los_direction: Direction
    nlos_coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    nlos_theta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    nlos_phi: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        n = len(self.nlos_coefficients)
        if len(self.nlos_theta) != n or len(self.nlos_phi) != n:
            raise ParameterError("scattered path lists must have equal lengths")
        if not np.all(np.isfinite(self.nlos_coefficients)):
            raise ParameterError("channel coefficients must be finite")

    @property
    def nlos_directions(self) -> list[Direction]:
        return [Direction(float(t), float(p)) for t, p in zip(self.nlos_theta, self.nlos_phi)]

    @property
    def path_count(self) -> int:
        return 1 + len(self.nlos_coefficients)


def free_space_coefficient(distance: float, wavelength: float) -> complex:
    """Free-space coefficient ``lambda / (4 pi d) * exp(j 2 pi d / lambda)``."""
    phase = 2 * math.pi * math.fmod(distance / wavelength, 1.0)
    return wavelength / (4 * math.pi * distance) * complex(math.cos(phase), math.sin(phase))


def irs_bs_channel(radio: RadioConfig) -> complex:
    """IRS-BS free-space coefficient ``h_r``."""
    return free_space_coefficient(radio.bs_distance, radio.wavelength)


def device_irs_los(point: CartesianPoint, wavelength: float) -> tuple[complex, Direction]:
    """LoS coefficient and incident direction for a device location.

    Raises:
        GeometryError: If the point is the IRS center.
    """
    direction, distance = direction_and_distance(point)
    return free_space_coefficient(distance, wavelength), direction


def _wrap_phi(phi: np.ndarray) -> np.ndarray:
    wrapped = np.mod(phi + np.pi, 2 * np.pi) - np.pi
    return np.where(wrapped <= -np.pi, np.pi, wrapped)


def sample_scattered_paths_batch(
    los: tuple[complex, Direction],
    model: ScatterModel,
    rng: np.random.Generator,
    size: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw ``size`` independent sets of scattered paths.

    Returns:
        ``(coefficients, theta, phi)`` each of shape ``(size, L - 1)``.
    """
    n_paths = model.path_count - 1
    coefficient, direction = los
    shape = (size, n_paths)
    if n_paths == 0:
        empty = np.zeros(shape)
        return empty.astype(complex), empty, empty.copy()

    variance = model.path_power_fraction * abs(coefficient) ** 2
    draws = rng.standard_normal((size, n_paths, 2))
    coefficients = math.sqrt(variance / 2) * (draws[..., 0] + 1j * draws[..., 1])

    angles = rng.standard_normal((size, n_paths, 2)) * model.direction_stddev
    # Clamping keeps the polar angle continuous for small perturbations
    theta = np.clip(direction.theta + angles[..., 0], 0.0, np.pi)
    phi = _wrap_phi(direction.phi + angles[..., 1])
    return coefficients, theta, phi


def sample_scattered_paths(
    los: tuple[complex, Direction],
    model: ScatterModel,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Draw the scattered paths accompanying a LoS path.

    Coefficients are circularly-symmetric complex normal with per-path variance
    ``rho / (L - 1) * |h_t0|^2``. Incident directions are normal around the LoS
    direction with ``direction_stddev`` per angle.
    """
    coefficients, theta, phi = sample_scattered_paths_batch(los, model, rng, 1)
    return ChannelRealization(
        los_coefficient=los[0],
        los_direction=los[1],
        nlos_coefficients=coefficients[0],
        nlos_theta=theta[0],
        nlos_phi=phi[0],
    )


def path_responses(
    theta: np.ndarray,
    phi: np.ndarray,
    w: PhaseShiftVector,
    radio: RadioConfig,
    geom: IrsGeometry,
    ucf_model: UnitCellFactorModel,
) -> np.ndarray:
    """IRS response ``upsilon a^H w`` for arrays of incident directions."""
    check_length(w, geom)
    a = steering_matrix(theta, phi, radio.bs_direction, geom)
    factor = ucf_model.evaluate(theta, radio.bs_direction.theta)
    return factor * (a.conj() @ w.coefficients)


def end_to_end_channel(
    realization: ChannelRealization,
    w: PhaseShiftVector,
    radio: RadioConfig,
    geom: IrsGeometry,
    ucf_model: UnitCellFactorModel,
) -> complex:
    """End-to-end scalar channel ``h_r * sum_l g(Psi_l, Psi_r) h_l``.

    The BS steering vector is absorbed by the matched filter, so only the
    scalar IRS-BS coefficient enters.

    Raises:
        DimensionError: If ``w`` does not match the surface.
    """
    theta = np.concatenate(([realization.los_direction.theta], realization.nlos_theta))
    phi = np.concatenate(([realization.los_direction.phi], realization.nlos_phi))
    coefficients = np.concatenate(([realization.los_coefficient], realization.nlos_coefficients))
    responses = path_responses(theta, phi, w, radio, geom, ucf_model)
    return complex(irs_bs_channel(radio) * np.sum(responses * coefficients))
