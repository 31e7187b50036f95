"""Command group with registration of the command modules."""

import importlib

import click

from irsdetect import __version__
from irsdetect.config import Settings
from irsdetect.utils.logging import get_logger

logger = get_logger("app")

COMMAND_MODULES = [
    "irsdetect.commands.design",
    "irsdetect.commands.coverage_map",
    "irsdetect.commands.sweep",
    "irsdetect.commands.montecarlo",
    "irsdetect.commands.validate",
]


class IrsDetectCli(click.Group):
    """Top-level ``irsdetect`` command carrying the runtime settings."""

    def __init__(self, settings: Settings) -> None:
        """Initialize the command group.

        Args:
            settings: Runtime configuration, passed to every command as ``ctx.obj``.
        """
        super().__init__(
            name="irsdetect",
            help="Design and evaluate IRS phase-shift configurations for device detection.",
        )
        self.settings = settings
        self.params.append(
            click.Option(["--version"], is_flag=True, expose_value=False, is_eager=True,
                         callback=_print_version, help="Show the version and exit.")
        )
        self._load_commands()

    def _load_commands(self) -> None:
        """Register every command module."""
        for module_name in COMMAND_MODULES:
            module = importlib.import_module(module_name)
            module.setup(self)
            logger.debug(f"Registered commands from {module_name}")

    def make_context(self, info_name, args, parent=None, **extra):
        extra.setdefault("obj", self.settings)
        return super().make_context(info_name, args, parent=parent, **extra)


def _print_version(ctx: click.Context, _param: click.Parameter, value: bool) -> None:
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"irsdetect {__version__}")
    ctx.exit()


def create_cli(settings: Settings) -> IrsDetectCli:
    """Build the command group for the given settings."""
    return IrsDetectCli(settings)
