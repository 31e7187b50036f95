"""Shared fixtures: reference scenario, small scenarios and seeded streams."""

import math
from pathlib import Path

import numpy as np
import pytest

from irsdetect.config import Settings
from irsdetect.scenario import bundled_scenario_path, dbm_to_watts, load_scenario, parse_scenario
from irsdetect.services.channel import RadioConfig
from irsdetect.services.geometry import Direction, IrsGeometry
from irsdetect.services.simulation import ScenarioConfig

SMALL_SCENARIO = """\
master_seed = 3

[irs]
u_count_x = 4
u_count_y = 4
spacing_x = 0.05
spacing_y = 0.05

[radio]
wavelength = 0.1
bs_distance = 30.0
bs_theta_deg = 0.0
bs_phi_deg = 90.0
bs_antennas = 16
tx_power_dbm = 28.0
noise_power_dbm = -95.0
sync_length = 32

[area]
center = [-10.0, -50.0, 50.0]
extent_y = 10.0
extent_z = 10.0
grid_ny = 3
grid_nz = 3

[design]
variant = "linear"
randomizations = 200
seed = 1
"""


def small_scenario_text(**overrides: str) -> str:
    """The small scenario with ``key = value`` lines replaced."""
    lines = []
    for line in SMALL_SCENARIO.splitlines():
        key = line.split("=", 1)[0].strip()
        lines.append(f"{key} = {overrides[key]}" if key in overrides else line)
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def reference() -> ScenarioConfig:
    return load_scenario(bundled_scenario_path())


@pytest.fixture
def small() -> ScenarioConfig:
    return parse_scenario(SMALL_SCENARIO)


@pytest.fixture
def small_path(tmp_path: Path) -> Path:
    path = tmp_path / "small.scenario"
    path.write_text(SMALL_SCENARIO, encoding="utf-8")
    return path


@pytest.fixture
def geom8() -> IrsGeometry:
    return IrsGeometry(8, 8, 0.05, 0.05, 0.1)


@pytest.fixture
def radio() -> RadioConfig:
    return RadioConfig(
        wavelength=0.1,
        bs_distance=30.0,
        bs_direction=Direction(0.0, math.pi / 2),
        bs_antennas=16,
        tx_power=dbm_to_watts(28.0),
        noise_power=dbm_to_watts(-95.0),
        sync_length=32,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def settings() -> Settings:
    return Settings(_env_file=None, threads=1)
