"""Console entry point of ``irsdetect``."""

import sys

from irsdetect.app import create_cli
from irsdetect.config import get_settings
from irsdetect.utils.logging import setup_logging


def main() -> None:
    settings = get_settings()
    logger = setup_logging(settings)
    logger.debug(f"Starting with {settings.threads} thread(s), solver {settings.sdr_solver}")

    try:
        create_cli(settings).main(prog_name="irsdetect")
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(130)


if __name__ == "__main__":
    main()
