from enum import Enum, StrEnum
from fractions import Fraction

DEFAULT_GROUP: str = "E7"
DEFAULT_TEMPLATES_DIR = "templates"
DATA_DIR_ENV_VAR: str = "DIRAC_SIEVE_DATA"

# Cap on ‖λ−sλ‖² for the scattered sieve. Groups not listed fall back to ‖2ρ‖².
DEFAULT_BOUNDS: dict[str, Fraction] = {"E7": Fraction(464)}

# Hard cap on any doubled coordinate searched by the sieve.
DEFAULT_MAX_COORDINATE: int = 128

# Rows per numpy block while expanding the sieve search tree.
SIEVE_CHUNK_ROWS: int = 200_000

DATASET_GROUPS: tuple[str, ...] = ("A6", "D6", "E7")
DATASET_COLUMNS: list[str] = [
    "group",
    "part",
    "srho",
    "lambda2",
    "spin_lkt",
    "mult",
    "star",
    "note",
]
CENSUS_COLUMNS: list[str] = ["srho", "word", "fixed_set"]
CANDIDATE_COLUMNS: list[str] = ["srho", "lambda2", "lkt", "spin_norm_sq"]

STRING_CONSTANTS_FILE: str = "string_constants.json"
STRING_CONSTANT_TYPES: tuple[str, ...] = (
    "A1",
    "A2",
    "A3",
    "A4",
    "A5",
    "A6",
    "D4",
    "D5",
    "D6",
    "E6",
)
# (N_0, ..., N_6) as published for complex E7, and the values of N_G the count
# pins down without outside input.
PUBLISHED_STRING_COUNTS: tuple[int, ...] = (1, 7, 27, 71, 135, 181, 156)
PINNED_STRING_CONSTANTS: dict[str, int] = {"A1": 1, "A2": 2, "A3": 4, "A6": 32, "D6": 34}

VERIFY_REPORT_TEMPLATE = "verify-report.html.jinja"


class ExitCode(int, Enum):
    """Process exit codes of the command line interface."""

    OK = 0
    FAILED = 1
    USAGE = 2


class OutputFormat(StrEnum):
    """Serialization formats for command output."""

    TSV = "tsv"
    JSON = "json"


class Check(StrEnum):
    """Checks applied to a table row by the verification suite."""

    INVOLUTION = "involution recovery"
    SCATTERED = "empty I(s)"
    MEMBERSHIP = "lambda in Lambda(s)"
    BOUND = "sieve bound"
    SPIN_NORM = "spin norm equality"
    U_SMALL = "u-small spin LKT"
    DOMINANCE = "dominant spin LKT and LKT"
    SIEVE = "sieve inclusion"
