import logging
from argparse import Namespace

from spinsieve.common.config import RunConfig
from spinsieve.common.constants import (
    DATASET_GROUPS,
    DEFAULT_GROUP,
    DEFAULT_MAX_COORDINATE,
    DEFAULT_TEMPLATES_DIR,
    ExitCode,
    OutputFormat,
)
from spinsieve.common.exceptions import TruncationError, UsageError
from spinsieve.common.rootsystem import Weight, build_root_datum
from spinsieve.common.utils import parse_int_list, parse_word
from spinsieve.common.weyl import (
    InvolutionRecord,
    enumerate_involutions,
    from_regular_image,
    from_word,
)
from spinsieve.scattered.output import (
    candidate_census_frame,
    fixed_set_distribution,
    involution_census_frame,
    render_verification_report,
    sieve_report_record,
    verification_document,
    write_frame,
    write_json,
    write_json_lines,
)
from spinsieve.scattered.sieve import enumerate_candidates, sieve_all
from spinsieve.scattered.tables import verify_all

logger = logging.getLogger(__name__)


def setup_scattered_commands(top_level_subparsers) -> None:
    """Add the involutions, sieve and verify commands to the top level subparser"""

    setup_involutions_command(top_level_subparsers)
    setup_sieve_command(top_level_subparsers)
    setup_verify_command(top_level_subparsers)


def _add_group_argument(parser, default: str | None = DEFAULT_GROUP) -> None:
    parser.add_argument(
        "-g",
        "--group",
        required=False,
        default=default,
        help=f"Root system label such as E7, D6 or A6 (default: {default or 'all'}).",
    )


def _add_output_arguments(parser) -> None:
    parser.add_argument(
        "-o",
        "--output",
        required=False,
        help="File to write the results to. Results go to stdout when omitted.",
    )
    parser.add_argument(
        "-f",
        "--format",
        required=False,
        choices=[str(f) for f in OutputFormat],
        default=str(OutputFormat.TSV),
        help="Output format for the results.",
    )


def setup_involutions_command(main_subparser) -> None:
    """Setup the 'involutions' command parser"""

    involutions_parser = main_subparser.add_parser(
        "involutions",
        help="Enumerate the involutions of the Weyl group and their fixed sets",
    )
    _add_group_argument(involutions_parser)
    _add_output_arguments(involutions_parser)
    involutions_parser.set_defaults(func=run_involutions_cmd)


def setup_sieve_command(main_subparser) -> None:
    """Setup the 'sieve' command parser"""

    sieve_parser = main_subparser.add_parser(
        "sieve",
        help="List the scattered candidates J(lambda, -s lambda) for an involution",
    )
    _add_group_argument(sieve_parser)

    selector = sieve_parser.add_mutually_exclusive_group(required=True)
    selector.add_argument(
        "--srho",
        help="The involution given by s rho, e.g. --srho=-2,6,7,-8,6,1,-3.",
    )
    selector.add_argument(
        "--word",
        help="The involution given by a word, e.g. 's1 s3 s4' or 1,3,4. "
        + "The rightmost letter acts first.",
    )
    selector.add_argument(
        "--census",
        action="store_true",
        help="Sieve every involution with empty I(s) and write the candidate census.",
    )

    sieve_parser.add_argument(
        "-b",
        "--bound",
        required=False,
        help="Cap B on |lambda - s lambda|^2 (default: 464 for E7, |2 rho|^2 otherwise).",
    )
    sieve_parser.add_argument(
        "-w",
        "--workers",
        required=False,
        type=int,
        default=1,
        help="Number of worker processes for --census.",
    )
    sieve_parser.add_argument(
        "--max-coordinate",
        dest="max_coordinate",
        required=False,
        type=int,
        default=DEFAULT_MAX_COORDINATE,
        help="Hard cap on the doubled coordinates searched "
        + f"(default: {DEFAULT_MAX_COORDINATE}).",
    )
    sieve_parser.add_argument(
        "--allow-truncated",
        action="store_true",
        help="Report candidates even if a search box was clipped by --max-coordinate.",
    )
    _add_output_arguments(sieve_parser)
    sieve_parser.set_defaults(func=run_sieve_cmd)


def setup_verify_command(main_subparser) -> None:
    """Setup the 'verify' command parser"""

    verify_parser = main_subparser.add_parser(
        "verify", help="Re-derive every checkable claim about the shipped tables"
    )
    _add_group_argument(verify_parser, default=None)
    verify_parser.add_argument(
        "-d",
        "--data",
        required=False,
        help="Directory holding the dataset TSV files. Overrides $DIRAC_SIEVE_DATA.",
    )
    verify_parser.add_argument(
        "-o",
        "--output",
        required=False,
        help="File to write the JSON verification report to.",
    )
    verify_parser.add_argument(
        "--html",
        required=False,
        help="File to render the HTML verification report to.",
    )
    verify_parser.add_argument(
        "--templates",
        required=False,
        default=DEFAULT_TEMPLATES_DIR,
        help="Directory holding the report templates.",
    )
    verify_parser.add_argument(
        "--skip-sieve",
        action="store_true",
        help="Skip the cross-check of the E7 rows against the candidate sieve.",
    )
    verify_parser.set_defaults(func=run_verify_cmd)


def resolve_involution(config: RunConfig, srho: str | None, word: str | None) -> InvolutionRecord:
    """Turn an sρ or word selector into an involution with empty I(s).

    Raises:
        UsageError: If the selector is not an involution or I(s) is non-empty.
        NotInOrbitError: If sρ is not in the orbit of ρ.
    """
    datum = build_root_datum(config.group)
    if srho is not None:
        element = from_regular_image(
            datum, Weight(tuple(2 * x for x in parse_int_list(srho)))
        )
    else:
        element = from_word(datum, parse_word(word or ""))

    if not element.is_involution:
        raise UsageError(f"The selected element {element!r} is not an involution")
    record = InvolutionRecord.from_element(element)
    if not record.is_scattered:
        raise UsageError(
            f"I(s) = {sorted(record.fixed_set)} is non-empty for s rho = {record.s_rho}; "
            + "the scattered sieve does not apply"
        )
    return record


def run_involutions_cmd(args: Namespace) -> ExitCode:
    config = RunConfig.from_args(args)
    datum = build_root_datum(config.group)
    records = enumerate_involutions(datum)

    records_to_stdout = config.output is None and config.format == OutputFormat.JSON
    if config.output is not None or records_to_stdout:
        frame = involution_census_frame(records)
        if config.format == OutputFormat.JSON:
            write_json_lines(frame.to_dict("records"), config.output)
        else:
            write_frame(frame, config.output)

    distribution = fixed_set_distribution(records)
    logger.info(
        "|I(s)| distribution: %s",
        " ".join(f"{size}:{count}" for size, count in distribution.items()),
    )
    summary = f"{len(records)} total, {distribution.get(0, 0)} with empty I(s)"
    # stdout stays pure JSON lines when it carries the records.
    if records_to_stdout:
        logger.info(summary)
    else:
        print(summary)
    return ExitCode.OK


def run_sieve_cmd(args: Namespace) -> ExitCode:
    config = RunConfig.from_args(args)
    datum = build_root_datum(config.group)

    if args.census:
        reports = list(
            sieve_all(
                datum,
                enumerate_involutions(datum),
                config.bound_b,
                workers=config.workers,
                max_coordinate=config.max_coordinate,
            ).values()
        )
    else:
        s = resolve_involution(config, args.srho, args.word)
        reports = [enumerate_candidates(datum, s, config.bound_b, config.max_coordinate)]

    truncated = [report for report in reports if report.truncated]
    if truncated and not args.allow_truncated:
        raise TruncationError(
            f"{len(truncated)} search box(es) clipped at {config.max_coordinate}, "
            + "raise --max-coordinate or pass --allow-truncated"
        )

    if config.format == OutputFormat.JSON:
        write_json_lines((sieve_report_record(report) for report in reports), config.output)
    else:
        write_frame(candidate_census_frame(reports), config.output)

    candidates = sum(len(report.candidates) for report in reports)
    if args.census:
        summary = f"{len(reports)} involutions, {candidates} candidates"
    else:
        summary = f"{candidates} candidates"
    if config.output is not None:
        print(summary)
    else:
        logger.info(summary)
    return ExitCode.OK


def run_verify_cmd(args: Namespace) -> ExitCode:
    config = RunConfig.from_args(args)
    if args.group:
        if config.group not in DATASET_GROUPS:
            raise UsageError(
                f"No dataset for {config.group}; choose one of {', '.join(DATASET_GROUPS)}"
            )
        groups: tuple[str, ...] = (config.group,)
    else:
        groups = DATASET_GROUPS

    summary = verify_all(groups, config.data_dir, sieve=not args.skip_sieve)

    for report in summary.reports:
        if not report.passed:
            logger.error(
                "%s failed: %s %s",
                report.row.row_id,
                ", ".join(str(check) for check in report.failures) or "",
                report.detail,
            )

    if config.output is not None:
        write_json(verification_document(summary), config.output)
    if args.html:
        render_verification_report(summary, args.html, config.templates_dir)

    print(summary.headline())
    return ExitCode.OK if summary.ok else ExitCode.FAILED
