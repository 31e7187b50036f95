"""The ``design`` command: build and save a phase-shift configuration."""

from pathlib import Path

import click

from irsdetect.commands.common import load, scenario_option
from irsdetect.config import Settings
from irsdetect.services.designs import DesignSpec, worst_case_gain
from irsdetect.services.simulation import build_design, scenario_gains, solve_scenario
from irsdetect.storage.design_file import write_design
from irsdetect.utils.error_handler import handle_errors
from irsdetect.utils.logging import get_logger

logger = get_logger("commands.design")


@click.command(name="design")
@scenario_option
@click.option(
    "--variant",
    type=click.Choice(["optimized", "linear", "quadratic"]),
    default=None,
    help="Design variant (defaults to the scenario's)",
)
@click.option("--tiles", type=click.IntRange(min=1), default=None, help="Tile count K of the linear design")
@click.option("--G", "randomizations", type=click.IntRange(min=1), default=None, help="Gaussian randomization draws")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Randomization seed")
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    required=True,
    help="Design file to write",
)
@click.pass_obj
@handle_errors
def design(
    settings: Settings,
    scenario_path: Path | None,
    variant: str | None,
    tiles: int | None,
    randomizations: int | None,
    seed: int | None,
    out_path: Path,
) -> None:
    """Build a phase-shift design and write it to a file."""
    scenario, digest = load(scenario_path)
    base = scenario.design
    spec = DesignSpec(
        variant=variant or base.variant,  # type: ignore[arg-type]
        randomizations=randomizations or base.randomizations,
        seed=base.seed if seed is None else seed,
        tiles=tiles or base.tiles,
    )

    solution = None
    if spec.variant == "optimized":
        solution = solve_scenario(scenario, settings.sdr_tolerance, settings.sdr_solver)
        gains = solution[0]
    else:
        gains = scenario_gains(scenario)
    w = build_design(
        scenario,
        spec,
        solution=solution,
        tolerance=settings.sdr_tolerance,
        solver=settings.sdr_solver,
    )
    gain, location = worst_case_gain(w, gains)

    write_design(out_path, w, spec, scenario.geom, scenario_hash=digest)
    if solution is not None:
        click.echo(f"tau: {solution[1].tau:.9e}")
        click.echo(f"duality_gap: {solution[1].duality_gap:.3e}")
    click.echo(f"worst_case_gain: {gain:.9e}")
    click.echo(f"worst_case_location: {location.x:g} {location.y:g} {location.z:g}")


def setup(cli: click.Group) -> None:
    """Register the design command."""
    cli.add_command(design)
