# main.py - Console entry point
import logging
import sys

from finsler_cone.cli import FinslerConeCLI
from finsler_cone.core.config import settings


def main(argv=None) -> int:
    # stdout carries reports and trajectories; logs go to stderr
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logger = logging.getLogger(__name__)
    logger.debug(f"{settings.PROJECT_NAME} starting (debug={settings.DEBUG})")
    return FinslerConeCLI().run(argv)


if __name__ == "__main__":
    sys.exit(main())
