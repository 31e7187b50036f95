"""The ``map`` command: analytical misdetection over the coverage area."""

import dataclasses
from pathlib import Path

import click

from irsdetect.commands.common import emit, load, load_design_for, out_option, scenario_option
from irsdetect.services.simulation import analytic_md_map
from irsdetect.storage.csv_writer import format_map
from irsdetect.utils.error_handler import handle_errors


@click.command(name="map")
@scenario_option
@click.option(
    "--design",
    "design_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Design file to evaluate",
)
@click.option(
    "--grid",
    type=(click.IntRange(min=1), click.IntRange(min=1)),
    default=None,
    metavar="NY NZ",
    help="Evaluation grid (defaults to the design grid)",
)
@out_option
@handle_errors
def coverage_map(
    scenario_path: Path | None,
    design_path: Path,
    grid: tuple[int, int] | None,
    out_path: Path | None,
) -> None:
    """Write the misdetection probability at every grid point as CSV."""
    scenario, digest = load(scenario_path)
    design_file = load_design_for(design_path, scenario)
    area = scenario.area
    if grid is not None:
        area = dataclasses.replace(area, grid_ny=grid[0], grid_nz=grid[1])

    md_map = analytic_md_map(scenario, design_file.w, area, design=design_file.spec.label)
    text = format_map(
        md_map,
        scenario_hash=digest,
        seed=scenario.master_seed,
        extra={"design_seed": str(design_file.spec.seed), "grid": f"{area.grid_ny}x{area.grid_nz}"},
    )
    emit(text, out_path)


def setup(cli: click.Group) -> None:
    """Register the map command."""
    cli.add_command(coverage_map)
