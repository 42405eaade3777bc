import sys
import copy
import logging
from functools import cache


LEVEL_STYLES = {
    "DEBUG": "\033[2m",  # DIM
    "WARNING": "\033[0;33m",  # YELLOW
    "ERROR": "\033[0;31m",  # RED
    "CRITICAL": "\033[1;31m",  # BOLD RED
}
RESET = "\033[0m"


class ColoredFormatter(logging.Formatter):
    """``thurston: warning: ...`` lines; level names are styled on a terminal."""

    def __init__(self, use_color: bool = True):
        super().__init__("%(name)s: %(levelname)s: %(message)s")
        self.use_color = use_color

    def format(self, record):
        record = copy.copy(record)
        record.levelname = record.levelname.lower()
        style = LEVEL_STYLES.get(record.levelname.upper())
        if self.use_color and style is not None:
            record.levelname = f"{style}{record.levelname}{RESET}"
        return super().format(record)


logger = logging.getLogger("thurston")
logger.propagate = False
logger.setLevel(logging.INFO)


if not logger.handlers:
    # reports own stdout, so log records go to stderr
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(ColoredFormatter(use_color=sys.stderr.isatty()))
    logger.addHandler(handler)


def set_verbosity(verbose: bool = False, quiet: bool = False) -> None:
    if quiet:
        logger.setLevel(logging.ERROR)
    elif verbose:
        logger.setLevel(logging.DEBUG)
    else:
        logger.setLevel(logging.INFO)


@cache
def warning_once(msg):
    logger.warning(msg)
