import logging
import os
from argparse import Namespace
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from spinsieve.common.constants import (
    DATA_DIR_ENV_VAR,
    DEFAULT_GROUP,
    DEFAULT_MAX_COORDINATE,
    DEFAULT_TEMPLATES_DIR,
    STRING_CONSTANTS_FILE,
    OutputFormat,
)
from spinsieve.common.exceptions import ConfigurationError, UsageError
from spinsieve.common.rootsystem import parse_type_label

logger = logging.getLogger(__name__)

PACKAGE_DIR = Path(__file__).resolve().parents[1]
PACKAGE_DATA_DIR = PACKAGE_DIR / "scattered" / "data"
PACKAGE_CONSTANTS_PATH = PACKAGE_DIR / "strings" / "data" / STRING_CONSTANTS_FILE


def resolve_data_dir(override: str | Path | None = None) -> Path:
    """Dataset directory: explicit override, then $DIRAC_SIEVE_DATA, then the package data.

    Raises:
        ConfigurationError: If the chosen directory does not exist.
    """
    if override:
        data_dir = Path(override)
        source = "--data"
    elif os.environ.get(DATA_DIR_ENV_VAR):
        data_dir = Path(os.environ[DATA_DIR_ENV_VAR])
        source = DATA_DIR_ENV_VAR
    else:
        data_dir = PACKAGE_DATA_DIR
        source = "package"

    if not data_dir.is_dir():
        raise ConfigurationError(f"Dataset directory {data_dir} ({source}) not found")
    logger.debug("Using dataset directory %s (%s)", data_dir, source)
    return data_dir


def resolve_constants_path(override: str | Path | None = None) -> Path:
    path = Path(override) if override else PACKAGE_CONSTANTS_PATH
    if not path.is_file():
        raise ConfigurationError(f"String constants file {path} not found")
    return path


def _parse_bound(text: str | None) -> Fraction | None:
    if text is None:
        return None
    try:
        bound = Fraction(text)
    except (ValueError, ZeroDivisionError) as ex:
        raise UsageError(f"Not a rational bound: {text!r}") from ex
    if bound <= 0:
        raise UsageError(f"The sieve bound must be positive, got {text}")
    return bound


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the commands, resolved from flags, environment and defaults.

    ``bound_b`` is None when the group default (464 for E7, ‖2ρ‖² otherwise)
    applies; ``output`` None means stdout.
    """

    group: str = DEFAULT_GROUP
    bound_b: Fraction | None = None
    workers: int = 1
    output: Path | None = None
    format: OutputFormat = OutputFormat.TSV
    data_dir: Path | None = None
    max_coordinate: int = DEFAULT_MAX_COORDINATE
    templates_dir: str = DEFAULT_TEMPLATES_DIR

    def __post_init__(self):
        family, rank = parse_type_label(self.group)
        object.__setattr__(self, "group", f"{family}{rank}")
        if self.workers < 1:
            raise UsageError(f"--workers must be at least 1, got {self.workers}")
        if self.max_coordinate < 1:
            raise UsageError(f"The coordinate cap must be positive, got {self.max_coordinate}")

    @classmethod
    def from_args(cls, args: Namespace) -> "RunConfig":
        """Build the config from a parsed namespace; absent flags keep their defaults."""

        output = getattr(args, "output", None)
        try:
            output_format = OutputFormat(getattr(args, "format", None) or OutputFormat.TSV)
        except ValueError as ex:
            raise UsageError(f"Unknown output format {args.format!r}") from ex

        data = getattr(args, "data", None)
        return cls(
            group=getattr(args, "group", None) or DEFAULT_GROUP,
            bound_b=_parse_bound(getattr(args, "bound", None)),
            workers=getattr(args, "workers", None) or 1,
            output=Path(output) if output else None,
            format=output_format,
            data_dir=resolve_data_dir(data) if data or "data" in args else None,
            max_coordinate=getattr(args, "max_coordinate", None) or DEFAULT_MAX_COORDINATE,
            templates_dir=getattr(args, "templates", None) or DEFAULT_TEMPLATES_DIR,
        )
