"""Scenario file schema.

Mirrors :class:`~irsdetect.services.simulation.ScenarioConfig` in the units of
the file: degrees, dBm and meters. Unknown keys are rejected at every level.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class IrsSection(_Section):
    """Surface layout."""

    u_count_x: int = Field(gt=0, description="Unit cells along x (even)")
    u_count_y: int = Field(gt=0, description="Unit cells along y (even)")
    spacing_x: float = Field(gt=0, description="Cell spacing along x in meters")
    spacing_y: float = Field(gt=0, description="Cell spacing along y in meters")
    unit_cell_factor: Literal["constant", "cosine_product"] = "constant"
    unit_cell_factor_value: float | None = Field(default=None, gt=0)
    unit_cell_gain_scale: float | None = Field(default=None, gt=0)

    @field_validator("u_count_x", "u_count_y")
    @classmethod
    def _even(cls, value: int) -> int:
        if value % 2:
            raise ValueError("unit-cell counts must be even")
        return value


class RadioSection(_Section):
    """Wavelength, BS placement and link budget."""

    wavelength: float = Field(gt=0, description="Carrier wavelength in meters")
    bs_distance: float = Field(gt=0, description="IRS-BS distance in meters")
    bs_theta_deg: float = Field(ge=0, le=180)
    bs_phi_deg: float = Field(gt=-180, le=180)
    bs_antennas: int = Field(ge=1)
    tx_power_dbm: float
    noise_power_dbm: float
    sync_length: int = Field(gt=1)


class NoiseSection(_Section):
    """Optional decomposition of the noise power."""

    psd_dbm_per_hz: float
    bandwidth_hz: float = Field(gt=0)
    noise_figure_db: float


class AreaSection(_Section):
    """Coverage area and its design grid."""

    center: tuple[float, float, float]
    extent_y: float = Field(ge=0)
    extent_z: float = Field(ge=0)
    grid_ny: int = Field(default=31, ge=1)
    grid_nz: int = Field(default=31, ge=1)


class DetectorSection(_Section):
    target_false_alarm: float = Field(default=0.1, gt=0, lt=1)


class DesignSection(_Section):
    variant: Literal["optimized", "linear", "quadratic"] = "optimized"
    randomizations: int = Field(default=3000, ge=1)
    seed: int = Field(default=0, ge=0)
    tiles: int = Field(default=1, ge=1)


class ScatterSection(_Section):
    path_count: int = Field(default=1, ge=1)
    power_ratio: float = Field(default=0.0, ge=0)
    direction_stddev: float = Field(default=0.1, ge=0, description="Radians per angle")

    @model_validator(mode="after")
    def _single_path_has_no_scatter(self) -> "ScatterSection":
        if self.path_count == 1 and self.power_ratio != 0:
            raise ValueError("power_ratio must be 0 when path_count is 1")
        return self


class ScenarioFile(_Section):
    """Top-level scenario document."""

    master_seed: int = Field(default=0, ge=0)
    irs: IrsSection
    radio: RadioSection
    area: AreaSection
    noise: NoiseSection | None = None
    detector: DetectorSection = DetectorSection()
    design: DesignSection = DesignSection()
    scatter: ScatterSection = ScatterSection()

    @model_validator(mode="after")
    def _tiles_divide_rows(self) -> "ScenarioFile":
        if self.irs.u_count_y % self.design.tiles:
            raise ValueError(
                f"design.tiles={self.design.tiles} must divide irs.u_count_y={self.irs.u_count_y}"
            )
        return self
