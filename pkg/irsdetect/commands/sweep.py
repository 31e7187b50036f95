"""The ``sweep`` command: design comparison over area sizes or scattering levels."""

import re
from pathlib import Path

import click

from irsdetect.commands.common import (
    emit,
    load,
    load_design_for,
    out_option,
    parse_floats,
    scenario_option,
)
from irsdetect.config import Settings
from irsdetect.services.designs import DesignSpec
from irsdetect.services.simulation import ScenarioConfig, build_design, scattering_sweep, sweep_area_sizes
from irsdetect.storage.csv_writer import format_sweep
from irsdetect.utils.error_handler import handle_errors

DEFAULT_DESIGNS = "linear1,linear4,quadratic,optimized"
_LABEL = re.compile(r"^(optimized|quadratic|linear(\d+)?)$")


def parse_design_labels(value: str, scenario: ScenarioConfig, randomizations: int | None, seed: int | None) -> list[DesignSpec]:
    """Turn labels such as ``linear4`` into design specs."""
    specs = []
    for label in (part.strip() for part in value.split(",") if part.strip()):
        match = _LABEL.match(label)
        if match is None:
            raise click.BadParameter(f"unknown design {label!r}", param_hint="--designs")
        if label.startswith("linear"):
            specs.append(DesignSpec("linear", tiles=int(match.group(2) or 1)))
        elif label == "quadratic":
            specs.append(DesignSpec("quadratic"))
        else:
            specs.append(
                DesignSpec(
                    "optimized",
                    randomizations=randomizations or scenario.design.randomizations,
                    seed=scenario.design.seed if seed is None else seed,
                )
            )
    if not specs:
        raise click.BadParameter("at least one design is required", param_hint="--designs")
    return specs


@click.command(name="sweep")
@scenario_option
@click.option("--sizes", default=None, help="Comma-separated square area sizes in meters")
@click.option("--rhos", default=None, help="Comma-separated scattered-to-LoS power ratios")
@click.option("--designs", default=DEFAULT_DESIGNS, show_default=True, help="Designs compared in a size sweep")
@click.option(
    "--design",
    "design_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Design file for a scattering sweep (defaults to the scenario's design)",
)
@click.option("--montecarlo", is_flag=True, help="Evaluate size sweeps by Monte-Carlo simulation")
@click.option("--trials", type=click.IntRange(min=1), default=None, help="Monte-Carlo trials per location")
@click.option("--repetitions", type=click.IntRange(min=1), default=None, help="Randomized designs averaged per size")
@click.option("--per-draw", is_flag=True, help="One row per randomized design instead of the mean")
@click.option("--G", "randomizations", type=click.IntRange(min=1), default=None, help="Gaussian randomization draws")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed for designs and Monte-Carlo streams")
@out_option
@click.pass_obj
@handle_errors
def sweep(
    settings: Settings,
    scenario_path: Path | None,
    sizes: str | None,
    rhos: str | None,
    designs: str,
    design_path: Path | None,
    montecarlo: bool,
    trials: int | None,
    repetitions: int | None,
    per_draw: bool,
    randomizations: int | None,
    seed: int | None,
    out_path: Path | None,
) -> None:
    """Compare designs over area sizes (--sizes) or scattering levels (--rhos)."""
    if (sizes is None) == (rhos is None):
        raise click.UsageError("give exactly one of --sizes and --rhos")
    scenario, digest = load(scenario_path)
    trials = trials or settings.default_trials
    mc_seed = scenario.master_seed if seed is None else seed

    if sizes is not None:
        specs = parse_design_labels(designs, scenario, randomizations, seed)
        rows = sweep_area_sizes(
            scenario,
            parse_floats(sizes, "--sizes"),
            specs,
            repetitions=repetitions or settings.default_repetitions,
            per_draw=per_draw,
            trials=trials if montecarlo else None,
            seed=mc_seed,
            threads=settings.threads,
            tolerance=settings.sdr_tolerance,
            solver=settings.sdr_solver,
        )
        extra = {"mode": "montecarlo" if montecarlo else "analytic"}
        if montecarlo:
            extra["trials"] = str(trials)
    else:
        if design_path is not None:
            design_file = load_design_for(design_path, scenario)
            w, label = design_file.w, design_file.spec.label
        else:
            spec = scenario.design
            w = build_design(scenario, spec, tolerance=settings.sdr_tolerance, solver=settings.sdr_solver)
            label = spec.label
        rows = scattering_sweep(
            scenario,
            w,
            parse_floats(rhos, "--rhos"),
            trials,
            seed=mc_seed,
            threads=settings.threads,
            design=label,
        )
        extra = {"mode": "montecarlo", "trials": str(trials)}

    emit(format_sweep(rows, scenario_hash=digest, seed=mc_seed, extra=extra), out_path)


def setup(cli: click.Group) -> None:
    """Register the sweep command."""
    cli.add_command(sweep)
