import logging
from argparse import Namespace

from spinsieve.common.config import resolve_constants_path, resolve_data_dir
from spinsieve.common.constants import ExitCode
from spinsieve.common.exceptions import UsageError
from spinsieve.common.rootsystem import build_root_datum
from spinsieve.common.utils import format_int_list
from spinsieve.scattered.tables import load_dataset
from spinsieve.strings.families import EXAMPLE_FAMILIES, example_family, scan_limits
from spinsieve.strings.levi import (
    coefficient_table,
    count_strings,
    format_coefficient_line,
    load_constants,
)

logger = logging.getLogger(__name__)

STRINGS_GROUP = "E7"


def setup_strings_parser(top_level_subparsers) -> None:
    """Add the strings command and its subcommands to the supplied top level subparser"""

    strings_parser = top_level_subparsers.add_parser(
        "strings", help="Count the strings of the Dirac series by Levi subset"
    )
    strings_parser.add_argument(
        "--coefficients",
        action="store_true",
        help="Also print the Levi classification: one line per subset size.",
    )
    strings_parser.add_argument(
        "-c",
        "--constants",
        required=False,
        help="JSON file with the per-type scattered counts N_G.",
    )
    strings_parser.add_argument(
        "--allow-inconsistent",
        action="store_true",
        help="Warn instead of failing when the constants contradict the published counts.",
    )
    strings_parser.set_defaults(func=run_strings_cmd)

    strings_subparser = strings_parser.add_subparsers(
        title="strings subcommands", dest="strings_subcommand"
    )
    setup_limits_command(strings_subparser)


def setup_limits_command(strings_subparser) -> None:
    """Setup the 'limits' command parser"""

    limits_parser = strings_subparser.add_parser(
        "limits", help="Scan a string family for limits and match them to the E7 tables"
    )
    limits_parser.add_argument(
        "--family",
        required=True,
        choices=EXAMPLE_FAMILIES,
        help="The string family to scan.",
    )
    limits_parser.add_argument(
        "--from",
        dest="start",
        type=int,
        default=-1,
        help="First free value to try (λ_k = value/2).",
    )
    limits_parser.add_argument(
        "--to",
        dest="stop",
        type=int,
        default=-20,
        help="Last free value to try.",
    )
    limits_parser.add_argument(
        "-d",
        "--data",
        required=False,
        help="Directory holding the dataset TSV files. Overrides $DIRAC_SIEVE_DATA.",
    )
    limits_parser.set_defaults(func=run_limits_cmd)


def run_strings_cmd(args: Namespace) -> ExitCode:
    datum = build_root_datum(STRINGS_GROUP)
    constants = load_constants(resolve_constants_path(args.constants))

    if args.coefficients:
        table = coefficient_table(datum)
        for size in range(datum.rank):
            print(format_coefficient_line(table[size]))

    counts, total = count_strings(datum, constants, strict=not args.allow_inconsistent)
    print(f"{' '.join(str(n) for n in counts)} | total {total}")
    return ExitCode.OK


def run_limits_cmd(args: Namespace) -> ExitCode:
    family = example_family(args.family)
    if args.start > 0 or args.stop > 0:
        raise UsageError("Limits need non-positive free values")
    step = -1 if args.stop <= args.start else 1
    values = range(args.start, args.stop + step, step)

    rows = load_dataset(STRINGS_GROUP, resolve_data_dir(args.data))
    variable = family.symbols[0].name
    found = 0
    for match in scan_limits(family, values, rows):
        if match.limit is None:
            print(f"{variable}={match.value}: no limit")
            continue
        found += 1
        srho = format_int_list(x // 2 for x in match.limit.s.s_rho.doubled)
        target = match.row.row_id if match.row is not None else "not in the tables"
        print(
            f"{variable}={match.value}: srho={srho} "
            + f"lambda2={format_int_list(match.limit.lam.doubled)} -> {target}"
        )
    logger.info("%s: %s limit(s) over %s value(s)", family.name, found, len(values))
    return ExitCode.OK
