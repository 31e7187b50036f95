"""Reading, writing and hashing scenario files.

Unit conversions between the file (degrees, dBm) and the internal model
(radians, watts) happen only here.
"""

import hashlib
import math
import re
from importlib import resources
from pathlib import Path
from typing import Any

import toml
from pydantic import ValidationError

from irsdetect.exceptions import IrsDetectError, ScenarioError
from irsdetect.scenario.models import (
    AreaSection,
    DesignSection,
    DetectorSection,
    IrsSection,
    NoiseSection,
    RadioSection,
    ScatterSection,
    ScenarioFile,
)
from irsdetect.services.channel import RadioConfig, ScatterModel
from irsdetect.services.designs import DesignSpec
from irsdetect.services.detector import DetectorConfig
from irsdetect.services.geometry import CartesianPoint, CoverageArea, Direction, IrsGeometry
from irsdetect.services.irs_model import UnitCellFactorModel
from irsdetect.services.simulation import NoiseComposition, ScenarioConfig
from irsdetect.utils.logging import get_logger

logger = get_logger("scenario")

BUNDLED_SCENARIO = "reference.scenario"
NOISE_MATCH_DB = 0.5
_EMIT_DIGITS = 12


def dbm_to_watts(dbm: float) -> float:
    """Convert a power level in dBm to watts."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    """Convert a power in watts to dBm."""
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def bundled_scenario_path() -> Path:
    """Path of the reference scenario shipped with the package."""
    return Path(str(resources.files("irsdetect.data").joinpath(BUNDLED_SCENARIO)))


def _locate(text: str, loc: tuple[Any, ...]) -> tuple[int | None, int | None]:
    """Best-effort line/column of the key a validation error refers to."""
    keys = [str(part) for part in loc if isinstance(part, str)]
    if not keys:
        return None, None
    section = keys[0] if len(keys) > 1 else None
    key = keys[-1]
    in_section = section is None
    header = re.compile(r"^\s*\[([^\]]+)\]\s*$")
    assignment = re.compile(rf"^(\s*){re.escape(key)}\s*=")
    section_line = None
    for number, line in enumerate(text.splitlines(), start=1):
        match = header.match(line)
        if match:
            in_section = match.group(1).strip() == section
            if in_section:
                section_line = number
            continue
        if in_section:
            hit = assignment.match(line)
            if hit:
                return number, len(hit.group(1)) + 1
    return section_line, 1 if section_line else None


def _to_config(document: ScenarioFile) -> ScenarioConfig:
    irs, radio, area = document.irs, document.radio, document.area
    geom = IrsGeometry(irs.u_count_x, irs.u_count_y, irs.spacing_x, irs.spacing_y, radio.wavelength)

    scale = UnitCellFactorModel.broadside_scale(geom)
    if irs.unit_cell_factor == "constant":
        ucf = UnitCellFactorModel("constant", value=irs.unit_cell_factor_value or scale)
    else:
        ucf = UnitCellFactorModel("cosine_product", gain_scale=irs.unit_cell_gain_scale or scale)

    noise_power = dbm_to_watts(radio.noise_power_dbm)
    noise = None
    if document.noise is not None:
        noise = NoiseComposition(
            psd=dbm_to_watts(document.noise.psd_dbm_per_hz),
            bandwidth=document.noise.bandwidth_hz,
            noise_figure=db_to_linear(document.noise.noise_figure_db),
        )
        composed_dbm = watts_to_dbm(noise.noise_power)
        if abs(composed_dbm - radio.noise_power_dbm) > NOISE_MATCH_DB:
            raise ScenarioError(
                f"noise_power_dbm={radio.noise_power_dbm} disagrees with "
                f"N0*B*F={composed_dbm:.2f} dBm"
            )

    radio_config = RadioConfig(
        wavelength=radio.wavelength,
        bs_distance=radio.bs_distance,
        bs_direction=Direction(math.radians(radio.bs_theta_deg), math.radians(radio.bs_phi_deg)),
        bs_antennas=radio.bs_antennas,
        tx_power=dbm_to_watts(radio.tx_power_dbm),
        noise_power=noise_power,
        sync_length=radio.sync_length,
    )
    return ScenarioConfig(
        geom=geom,
        area=CoverageArea(
            center=CartesianPoint(*area.center),
            extent_y=area.extent_y,
            extent_z=area.extent_z,
            grid_ny=area.grid_ny,
            grid_nz=area.grid_nz,
        ),
        radio=radio_config,
        detector=DetectorConfig(document.detector.target_false_alarm, noise_power),
        design=DesignSpec(
            variant=document.design.variant,
            randomizations=document.design.randomizations,
            seed=document.design.seed,
            tiles=document.design.tiles,
        ),
        scatter=ScatterModel(
            document.scatter.path_count,
            document.scatter.power_ratio,
            document.scatter.direction_stddev,
        ),
        ucf_model=ucf,
        master_seed=document.master_seed,
        noise=noise,
    )


def _emit(value: float) -> float:
    return round(value, _EMIT_DIGITS) + 0.0


def _from_config(config: ScenarioConfig) -> ScenarioFile:
    geom, radio, area, ucf = config.geom, config.radio, config.area, config.ucf_model
    scale = UnitCellFactorModel.broadside_scale(geom)
    ucf_value = None
    ucf_gain = None
    if ucf.variant == "constant" and not math.isclose(ucf.value, scale, rel_tol=1e-12):
        ucf_value = ucf.value
    if ucf.variant == "cosine_product" and not math.isclose(ucf.gain_scale, scale, rel_tol=1e-12):
        ucf_gain = ucf.gain_scale

    noise = None
    if config.noise is not None:
        noise = NoiseSection(
            psd_dbm_per_hz=_emit(watts_to_dbm(config.noise.psd)),
            bandwidth_hz=config.noise.bandwidth,
            noise_figure_db=_emit(linear_to_db(config.noise.noise_figure)),
        )

    return ScenarioFile(
        master_seed=config.master_seed,
        irs=IrsSection(
            u_count_x=geom.u_count_x,
            u_count_y=geom.u_count_y,
            spacing_x=geom.spacing_x,
            spacing_y=geom.spacing_y,
            unit_cell_factor=ucf.variant,
            unit_cell_factor_value=ucf_value,
            unit_cell_gain_scale=ucf_gain,
        ),
        radio=RadioSection(
            wavelength=radio.wavelength,
            bs_distance=radio.bs_distance,
            bs_theta_deg=_emit(math.degrees(radio.bs_direction.theta)),
            bs_phi_deg=_emit(math.degrees(radio.bs_direction.phi)),
            bs_antennas=radio.bs_antennas,
            tx_power_dbm=_emit(watts_to_dbm(radio.tx_power)),
            noise_power_dbm=_emit(watts_to_dbm(radio.noise_power)),
            sync_length=radio.sync_length,
        ),
        area=AreaSection(
            center=(area.center.x, area.center.y, area.center.z),
            extent_y=area.extent_y,
            extent_z=area.extent_z,
            grid_ny=area.grid_ny,
            grid_nz=area.grid_nz,
        ),
        noise=noise,
        detector=DetectorSection(target_false_alarm=config.detector.target_false_alarm),
        design=DesignSection(
            variant=config.design.variant,
            randomizations=config.design.randomizations,
            seed=config.design.seed,
            tiles=config.design.tiles,
        ),
        scatter=ScatterSection(
            path_count=config.scatter.path_count,
            power_ratio=config.scatter.power_ratio,
            direction_stddev=config.scatter.direction_stddev,
        ),
    )


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse scenario text into a validated configuration.

    Raises:
        ScenarioError: On TOML syntax errors, unknown keys or invalid values.
    """
    try:
        raw = toml.loads(text)
    except toml.TomlDecodeError as e:
        raise ScenarioError(f"invalid TOML: {e.msg}", line=e.lineno, column=e.colno) from e

    try:
        document = ScenarioFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        line, column = _locate(text, tuple(first["loc"]))
        raise ScenarioError(f"{field}: {first['msg']}", line=line, column=column) from e

    try:
        return _to_config(document)
    except ScenarioError:
        raise
    except IrsDetectError as e:
        raise ScenarioError(str(e)) from e


def load_scenario(path: Path | str) -> ScenarioConfig:
    """Read and validate a scenario file.

    Raises:
        ScenarioError: If the file cannot be read or validated.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e.strerror}") from e
    try:
        config = parse_scenario(text)
    except ScenarioError as e:
        raise ScenarioError(f"{path}: {e}") from e
    logger.info(f"Loaded scenario {path} (hash {scenario_hash(config)})")
    return config


def dump_scenario(config: ScenarioConfig) -> str:
    """Canonical TOML emission of a configuration."""
    return toml.dumps(_from_config(config).model_dump(mode="json", exclude_none=True))


def save_scenario(config: ScenarioConfig, path: Path | str) -> None:
    Path(path).write_text(dump_scenario(config), encoding="utf-8")


def scenario_hash(config: ScenarioConfig) -> str:
    """Short SHA-256 digest of the canonical emission."""
    return hashlib.sha256(dump_scenario(config).encode("utf-8")).hexdigest()[:16]
