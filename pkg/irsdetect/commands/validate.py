"""The ``validate`` command: check a scenario and optionally a design against it."""

from pathlib import Path

import click
import numpy as np

from irsdetect.commands.common import load, load_design_for, scenario_option
from irsdetect.config import Settings
from irsdetect.scenario import watts_to_dbm
from irsdetect.services.irs_model import UNIT_MODULUS_TOL
from irsdetect.services.simulation import grid_convergence
from irsdetect.utils.error_handler import handle_errors

CONVERGENCE_LIMIT = 0.01


@click.command(name="validate")
@scenario_option
@click.option(
    "--design",
    "design_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Design file to check against the scenario",
)
@click.option("--convergence", is_flag=True, help="Re-solve the relaxation on a refined grid")
@click.pass_obj
@handle_errors
def validate(
    settings: Settings,
    scenario_path: Path | None,
    design_path: Path | None,
    convergence: bool,
) -> None:
    """Print derived quantities of a scenario."""
    scenario, digest = load(scenario_path)
    radio = scenario.radio
    click.echo(f"scenario_hash: {digest}")
    click.echo(f"cells: {scenario.geom.u_count_x}x{scenario.geom.u_count_y}")
    click.echo(f"design_grid: {scenario.area.grid_ny}x{scenario.area.grid_nz}")
    click.echo(f"threshold: {scenario.detector.threshold:.12g}")
    click.echo(f"noise_power_w: {radio.noise_power:.6e}")
    click.echo(f"noise_power_dbm: {watts_to_dbm(radio.noise_power):.6f}")
    click.echo(f"tx_power_w: {radio.tx_power:.6e}")

    if design_path is not None:
        design_file = load_design_for(design_path, scenario)
        deviation = float(np.max(np.abs(np.abs(design_file.w.coefficients) - 1.0)))
        click.echo(f"design: {design_file.spec.label} ({len(design_file.w)} cells)")
        click.echo(f"unit_modulus_deviation: {deviation:.3e}")
        if deviation > UNIT_MODULUS_TOL:
            raise click.ClickException("design entries are not unit modulus")
        if design_file.scenario_hash and design_file.scenario_hash != digest:
            click.echo(f"warning: design was built for scenario {design_file.scenario_hash}", err=True)

    if convergence:
        tau, tau_refined, change = grid_convergence(scenario, settings.sdr_tolerance, settings.sdr_solver)
        click.echo(f"tau: {tau:.9e}")
        click.echo(f"tau_refined: {tau_refined:.9e}")
        click.echo(f"relative_change: {change:.6f}")
        if change >= CONVERGENCE_LIMIT:
            click.echo("warning: design grid may be too coarse", err=True)


def setup(cli: click.Group) -> None:
    """Register the validate command."""
    cli.add_command(validate)
