"""IRS steering vectors, unit-cell factor and reflected-field response."""

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from irsdetect.exceptions import DimensionError, ParameterError
from irsdetect.services.geometry import Direction, IrsGeometry, wave_vector, wave_vectors

UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PhaseShiftVector:
    """Unit-modulus reflection coefficients, one per cell in linear order."""

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coefficients = np.asarray(self.coefficients, dtype=complex).ravel()
        if coefficients.size == 0:
            raise DimensionError("phase-shift vector is empty")
        deviation = np.max(np.abs(np.abs(coefficients) - 1.0))
        if deviation > UNIT_MODULUS_TOL:
            raise ParameterError(f"coefficients are not unit modulus (max deviation {deviation:.2e})")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_phases(cls, phases: np.ndarray) -> "PhaseShiftVector":
        """Build a vector from per-cell phases in radians."""
        return cls(np.exp(1j * np.asarray(phases, dtype=float)))

    @property
    def phases(self) -> np.ndarray:
        """Per-cell phases in ``(-pi, pi]``."""
        return np.angle(self.coefficients)

    def __len__(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True, eq=False)
class SteeringVector:
    """Per-cell phase profile of an incident/reflection direction pair."""

    entries: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.entries.size


@dataclass(frozen=True)
class UnitCellFactorModel:
    """Direction-dependent gain of a single cell.

    ``constant`` returns ``value``; ``cosine_product`` scales
    ``sqrt(cos(theta_t) * cos(theta_r))`` by ``gain_scale``.
    """

    variant: Literal["constant", "cosine_product"] = "constant"
    value: float = 1.0
    gain_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.variant not in ("constant", "cosine_product"):
            raise ParameterError(f"unknown unit-cell factor model {self.variant!r}")
        if self.value <= 0:
            raise ParameterError("constant unit-cell factor must be positive")
        if self.gain_scale <= 0:
            raise ParameterError("unit-cell gain scale must be positive")

    @classmethod
    def broadside_scale(cls, geom: IrsGeometry) -> float:
        """Physical broadside scale 4*pi*d_x*d_y / lambda^2."""
        return 4 * math.pi * geom.spacing_x * geom.spacing_y / geom.wavelength**2

    @classmethod
    def constant(cls, geom: IrsGeometry) -> "UnitCellFactorModel":
        return cls("constant", value=cls.broadside_scale(geom))

    @classmethod
    def cosine_product(cls, geom: IrsGeometry) -> "UnitCellFactorModel":
        return cls("cosine_product", gain_scale=cls.broadside_scale(geom))

    def evaluate(self, theta_t: np.ndarray, theta_r: float) -> np.ndarray:
        """Vectorised factor for arrays of incident polar angles."""
        theta_t = np.asarray(theta_t, dtype=float)
        if self.variant == "constant":
            return np.full(theta_t.shape, self.value)
        product = np.clip(np.cos(theta_t) * math.cos(theta_r), 0.0, None)
        return self.gain_scale * np.sqrt(product)


def steering_vector(incident: Direction, reflect: Direction, geom: IrsGeometry) -> SteeringVector:
    """Steering vector ``exp(-j (k_t + k_r)^T c)`` over all cells.

    Entries follow the linear cell order of ``unit_cell_index``.
    """
    k_sum = wave_vector(incident, geom.wavelength) + wave_vector(reflect, geom.wavelength)
    return SteeringVector(np.exp(-1j * geom.cell_positions() @ k_sum))


def steering_matrix(
    theta_t: np.ndarray,
    phi_t: np.ndarray,
    reflect: Direction,
    geom: IrsGeometry,
) -> np.ndarray:
    """Steering vectors for many incident directions at once.

    Returns:
        Complex array of shape ``theta_t.shape + (U,)``.
    """
    k_sum = wave_vectors(theta_t, phi_t, geom.wavelength) + wave_vector(reflect, geom.wavelength)
    return np.exp(-1j * (k_sum @ geom.cell_positions().T))


def unit_cell_factor(incident: Direction, reflect: Direction, model: UnitCellFactorModel) -> float:
    """Unit-cell factor for a direction pair."""
    return float(model.evaluate(np.float64(incident.theta), reflect.theta))


def irs_response(
    incident: Direction,
    reflect: Direction,
    w: PhaseShiftVector,
    geom: IrsGeometry,
    model: UnitCellFactorModel,
) -> complex:
    """Reflected field ``upsilon * a^H w`` for a direction pair.

    Raises:
        DimensionError: If ``w`` does not have one entry per cell.
    """
    check_length(w, geom)
    a = steering_vector(incident, reflect, geom).entries
    return complex(unit_cell_factor(incident, reflect, model) * np.vdot(a, w.coefficients))


def check_length(w: PhaseShiftVector, geom: IrsGeometry) -> None:
    """Raise if ``w`` does not match the surface size."""
    if len(w) != geom.cell_count:
        raise DimensionError(
            f"phase-shift vector has {len(w)} entries, surface has {geom.cell_count} cells"
        )
