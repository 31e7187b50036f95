"""Coordinate frames, unit-cell layout and coverage-area sampling.

The IRS lies in the xy-plane with its center at the origin. Directions are
given in the spherical frame of the surface: ``theta`` from the +z axis and
``phi`` in the xy-plane.
"""

import math
from dataclasses import dataclass

import numpy as np

from irsdetect.exceptions import CellIndexError, GeometryError, ParameterError


@dataclass(frozen=True)
class Direction:
    """Polar/azimuth angle pair in radians."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ParameterError(f"theta must lie in [0, pi], got {self.theta}")
        if not -math.pi < self.phi <= math.pi:
            raise ParameterError(f"phi must lie in (-pi, pi], got {self.phi}")


@dataclass(frozen=True)
class CartesianPoint:
    """Point in the IRS frame, in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ParameterError(f"coordinates must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class IrsGeometry:
    """Planar IRS of ``u_count_x`` by ``u_count_y`` unit cells."""

    u_count_x: int
    u_count_y: int
    spacing_x: float
    spacing_y: float
    wavelength: float

    def __post_init__(self) -> None:
        for name in ("u_count_x", "u_count_y"):
            count = getattr(self, name)
            if count <= 0 or count % 2:
                raise ParameterError(f"{name} must be a positive even integer, got {count}")
        for name in ("spacing_x", "spacing_y", "wavelength"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be strictly positive")

    @property
    def cell_count(self) -> int:
        """Total number of unit cells U."""
        return self.u_count_x * self.u_count_y

    @property
    def index_bounds(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Inclusive (min, max) index range along x and along y."""
        return (
            (-self.u_count_x // 2 + 1, self.u_count_x // 2),
            (-self.u_count_y // 2 + 1, self.u_count_y // 2),
        )

    def cell_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Two-dimensional indices of every cell in linear order.

        Returns:
            Arrays ``(u_x, u_y)`` of length U.
        """
        u = np.arange(self.cell_count)
        u_x = u % self.u_count_x - self.u_count_x // 2 + 1
        u_y = u // self.u_count_x - self.u_count_y // 2 + 1
        return u_x, u_y

    def cell_positions(self) -> np.ndarray:
        """Coordinates of every cell as a (U, 3) array."""
        u_x, u_y = self.cell_indices()
        positions = np.zeros((self.cell_count, 3))
        positions[:, 0] = self.spacing_x * u_x
        positions[:, 1] = self.spacing_y * u_y
        return positions


@dataclass(frozen=True)
class CoverageArea:
    """Rectangular area parallel to the yz-plane, sampled on a grid."""

    center: CartesianPoint
    extent_y: float
    extent_z: float
    grid_ny: int = 31
    grid_nz: int = 31

    def __post_init__(self) -> None:
        if self.extent_y < 0 or self.extent_z < 0:
            raise ParameterError("coverage extents must be nonnegative")
        if self.grid_ny < 1 or self.grid_nz < 1:
            raise ParameterError("grid counts must be at least 1")

    def contains(self, point: CartesianPoint, tol: float = 1e-9) -> bool:
        """Check membership of a point in the area."""
        c = self.center
        return (
            abs(point.x - c.x) <= tol
            and abs(point.y - c.y) <= self.extent_y / 2 + tol
            and abs(point.z - c.z) <= self.extent_z / 2 + tol
        )


def unit_cell_index(u: int, geom: IrsGeometry) -> tuple[int, int]:
    """Map a linear cell index to its two-dimensional index.

    Args:
        u: Linear index in ``[0, U)``.
        geom: IRS geometry.

    Returns:
        ``(u_x, u_y)`` centred so that the surface spans
        ``[-U_x/2 + 1, U_x/2]`` by ``[-U_y/2 + 1, U_y/2]``.

    Raises:
        CellIndexError: If ``u`` is out of range.
    """
    if not 0 <= u < geom.cell_count:
        raise CellIndexError(f"cell index {u} outside [0, {geom.cell_count})")
    u_x = u % geom.u_count_x - geom.u_count_x // 2 + 1
    u_y = u // geom.u_count_x - geom.u_count_y // 2 + 1
    return u_x, u_y


def unit_cell_position(u_x: int, u_y: int, geom: IrsGeometry) -> CartesianPoint:
    """Coordinates of the ``(u_x, u_y)`` cell.

    Raises:
        CellIndexError: If either index is outside the surface.
    """
    (x_min, x_max), (y_min, y_max) = geom.index_bounds
    if not (x_min <= u_x <= x_max and y_min <= u_y <= y_max):
        raise CellIndexError(f"cell ({u_x}, {u_y}) outside the surface")
    return CartesianPoint(geom.spacing_x * u_x, geom.spacing_y * u_y, 0.0)


def wave_vectors(theta: np.ndarray, phi: np.ndarray, wavelength: float) -> np.ndarray:
    """Vectorised wave vectors for arrays of angles.

    Returns:
        Array of shape ``theta.shape + (3,)`` in rad/m.
    """
    if wavelength <= 0:
        raise ParameterError(f"wavelength must be positive, got {wavelength}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sin_theta = np.sin(theta)
    unit = np.stack(
        (sin_theta * np.cos(phi), sin_theta * np.sin(phi), np.cos(theta)),
        axis=-1,
    )
    return (2 * np.pi / wavelength) * unit


def wave_vector(direction: Direction, wavelength: float) -> np.ndarray:
    """Wave vector of a plane wave travelling along ``direction``.

    Raises:
        ParameterError: If the wavelength is not positive.
    """
    return wave_vectors(np.float64(direction.theta), np.float64(direction.phi), wavelength)


def direction_and_distance(point: CartesianPoint) -> tuple[Direction, float]:
    """Convert a point to its direction and distance from the IRS center.

    On the z axis the azimuth is undefined and reported as 0.

    Raises:
        GeometryError: If the point is the origin.
    """
    distance = math.sqrt(point.x**2 + point.y**2 + point.z**2)
    if distance == 0.0:
        raise GeometryError("the IRS center has no direction")
    theta = math.acos(max(-1.0, min(1.0, point.z / distance)))
    phi = math.atan2(point.y, point.x) if (point.x or point.y) else 0.0
    # atan2 returns -pi for (-x, -0.0); fold onto the half-open interval
    if phi <= -math.pi:
        phi = math.pi
    return Direction(theta, phi), distance


def point_from_direction(direction: Direction, distance: float) -> CartesianPoint:
    """Inverse of :func:`direction_and_distance`."""
    sin_theta = math.sin(direction.theta)
    return CartesianPoint(
        distance * sin_theta * math.cos(direction.phi),
        distance * sin_theta * math.sin(direction.phi),
        distance * math.cos(direction.theta),
    )


def axis_samples(center: float, extent: float, count: int) -> np.ndarray:
    """Evenly spaced samples across one axis of the coverage area.

    Args:
        center: Axis coordinate of the area center.
        extent: Side length along the axis.
        count: Number of samples; 1 yields the center only.

    Returns:
        Samples from ``center - extent/2`` to ``center + extent/2`` inclusive.
    """
    if count == 1:
        return np.array([center])
    return np.linspace(center - extent / 2, center + extent / 2, count)


def coverage_grid(area: CoverageArea) -> list[CartesianPoint]:
    """Sample the coverage area on a regular grid.

    Both interval endpoints are included; a count of 1 yields the midpoint.
    Ordering is row-major in ``(y, z)``: z varies fastest.
    """
    ys = axis_samples(area.center.y, area.extent_y, area.grid_ny)
    zs = axis_samples(area.center.z, area.extent_z, area.grid_nz)
    return [
        CartesianPoint(area.center.x, float(y), float(z))
        for y in ys
        for z in zs
    ]


def grid_array(points: list[CartesianPoint]) -> np.ndarray:
    """Stack points into a (Q, 3) array."""
    return np.array([[p.x, p.y, p.z] for p in points], dtype=float).reshape(-1, 3)


def directions_and_distances(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised spherical conversion of a (Q, 3) point array.

    Returns:
        ``(theta, phi, distance)`` arrays of length Q.

    Raises:
        GeometryError: If any point is the origin.
    """
    distance = np.linalg.norm(points, axis=1)
    if np.any(distance == 0):
        raise GeometryError("the IRS center has no direction")
    theta = np.arccos(np.clip(points[:, 2] / distance, -1.0, 1.0))
    phi = np.arctan2(points[:, 1], points[:, 0])
    phi = np.where(phi <= -np.pi, np.pi, phi)
    return theta, phi, distance
