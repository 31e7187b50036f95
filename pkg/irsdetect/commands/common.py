"""Options and helpers shared by the command modules."""

from pathlib import Path

import click

from irsdetect.scenario import bundled_scenario_path, load_scenario, scenario_hash
from irsdetect.services.simulation import ScenarioConfig
from irsdetect.storage.csv_writer import write_text
from irsdetect.storage.design_file import DesignFile, read_design


def scenario_option(func):
    """Add the ``--scenario`` option, passed on as ``scenario_path``.

    Args:
        func: Click command callback to decorate.

    Returns:
        The decorated callback.
    """
    return click.option(
        "--scenario",
        "scenario_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help="Scenario file (defaults to the bundled reference scenario)",
    )(func)


def out_option(func):
    """Add the ``--out`` option, passed on as ``out_path``; unset means stdout."""
    return click.option(
        "--out",
        "out_path",
        type=click.Path(dir_okay=False, writable=True, path_type=Path),
        default=None,
        help="Output file (defaults to stdout)",
    )(func)


def load(scenario_path: Path | None) -> tuple[ScenarioConfig, str]:
    """Load a scenario and its hash."""
    config = load_scenario(scenario_path or bundled_scenario_path())
    return config, scenario_hash(config)


def load_design_for(path: Path, scenario: ScenarioConfig) -> DesignFile:
    """Read a design file and check it fits the scenario's IRS.

    Raises:
        DesignFileError: If the file is malformed.
        DimensionError: If the cell counts disagree.
    """
    design_file = read_design(path)
    design_file.check_geometry(scenario.geom)
    return design_file


def emit(text: str, out_path: Path | None) -> None:
    """Write command output to ``out_path``, or to stdout when it is ``None``.

    Args:
        text: Complete output, newline-terminated.
        out_path: Destination file, replaced if it exists.
    """
    if out_path is None:
        click.echo(text, nl=False)
    else:
        write_text(out_path, text)


def parse_floats(value: str, name: str) -> list[float]:
    """Parse a comma-separated list of numbers."""
    try:
        values = [float(part) for part in value.split(",") if part.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}", param_hint=name) from e
    if not values:
        raise click.BadParameter("at least one value is required", param_hint=name)
    return values
