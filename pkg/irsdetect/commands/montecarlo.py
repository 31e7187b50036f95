"""The ``montecarlo`` command: empirical detection statistics."""

from pathlib import Path

import click

from irsdetect.commands.common import emit, load, load_design_for, out_option, scenario_option
from irsdetect.config import Settings
from irsdetect.services.simulation import monte_carlo_false_alarm, monte_carlo_md
from irsdetect.storage.csv_writer import format_stats
from irsdetect.utils.error_handler import handle_errors


@click.command(name="montecarlo")
@scenario_option
@click.option(
    "--design",
    "design_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Design file to evaluate (not needed with --h0)",
)
@click.option("--trials", type=click.IntRange(min=1), default=None, help="Trials per location")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed override")
@click.option("--h0", is_flag=True, help="Measure the false-alarm rate on noise-only observations")
@out_option
@click.pass_obj
@handle_errors
def montecarlo(
    settings: Settings,
    scenario_path: Path | None,
    design_path: Path | None,
    trials: int | None,
    seed: int | None,
    h0: bool,
    out_path: Path | None,
) -> None:
    """Simulate the detector and report the worst-case empirical rates."""
    scenario, digest = load(scenario_path)
    trials = trials or settings.default_trials
    seed = scenario.master_seed if seed is None else seed

    if h0:
        stats = monte_carlo_false_alarm(scenario, trials, seed=seed)
        extra = {"hypothesis": "H0"}
    else:
        if design_path is None:
            raise click.UsageError("--design is required unless --h0 is given")
        design_file = load_design_for(design_path, scenario)
        stats = monte_carlo_md(scenario, design_file.w, trials, seed=seed, threads=settings.threads)
        extra = {"hypothesis": "H1", "design": design_file.spec.label}

    emit(format_stats(stats, scenario_hash=digest, seed=seed, extra=extra), out_path)


def setup(cli: click.Group) -> None:
    """Register the montecarlo command."""
    cli.add_command(montecarlo)
