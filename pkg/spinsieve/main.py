import logging
import sys
from argparse import ArgumentParser, Namespace

from spinsieve.common.constants import ExitCode
from spinsieve.common.exceptions import (
    ConfigurationError,
    ConstantsError,
    DatasetError,
    NotInOrbitError,
    SpinSieveError,
    TruncationError,
    UsageError,
)
from spinsieve.scattered.main import setup_scattered_commands
from spinsieve.strings.main import setup_strings_parser

logger = logging.getLogger(__name__)

EXIT_CODES: dict[type[SpinSieveError], ExitCode] = {
    UsageError: ExitCode.USAGE,
    ConfigurationError: ExitCode.USAGE,
    ConstantsError: ExitCode.USAGE,
    NotInOrbitError: ExitCode.USAGE,
    DatasetError: ExitCode.FAILED,
    TruncationError: ExitCode.FAILED,
}


def configure_logging(verbosity: int) -> None:
    """Configure logging based on verbosity level.

    Args:
        verbosity: -1 for quiet (WARNING+), 0 for default (INFO+), 1 for verbose (DEBUG+)
    """
    if verbosity >= 1:
        level = logging.DEBUG
        fmt = "%(levelname)s [%(name)s]: %(message)s"
    elif verbosity <= -1:
        level = logging.WARNING
        fmt = "%(levelname)s: %(message)s"
    else:
        level = logging.INFO
        fmt = "%(levelname)s: %(message)s"

    logging.basicConfig(level=level, format=fmt)


def setup_top_level_parser() -> ArgumentParser:

    top_level_parser = ArgumentParser(
        "spinsieve",
        description="Spinsieve - scattered parameters and strings of the Dirac series",
    )
    top_level_parser.set_defaults(func=lambda _: print(top_level_parser.format_help()))

    verbosity_group = top_level_parser.add_mutually_exclusive_group()
    verbosity_group.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=False,
        help="Enable verbose/debug output",
    )
    verbosity_group.add_argument(
        "-q",
        "--quiet",
        action="store_true",
        default=False,
        help="Suppress informational output, show only warnings and errors",
    )

    top_level_subparsers = top_level_parser.add_subparsers()

    setup_scattered_commands(top_level_subparsers)
    setup_strings_parser(top_level_subparsers)

    return top_level_parser


def exit_code_for(ex: SpinSieveError) -> ExitCode:
    for error_type in type(ex).__mro__:
        if error_type in EXIT_CODES:
            return EXIT_CODES[error_type]
    return ExitCode.FAILED


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the selected command and return its exit code."""

    parser = setup_top_level_parser()
    try:
        args: Namespace = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)

    verbosity = 0
    if getattr(args, "verbose", False):
        verbosity = 1
    elif getattr(args, "quiet", False):
        verbosity = -1
    configure_logging(verbosity)

    try:
        result = args.func(args)
    except SpinSieveError as ex:
        logger.error("%s", ex)
        for problem in getattr(ex, "problems", []):
            logger.error("  %s", problem)
        return exit_code_for(ex)
    except OSError as ex:
        logger.error("I/O failure: %s", ex)
        return ExitCode.FAILED
    return int(result) if result is not None else ExitCode.OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
