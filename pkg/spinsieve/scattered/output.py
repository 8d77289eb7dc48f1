import json
import logging
import sys
from collections.abc import Iterable
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, Template
from pandas import DataFrame

from spinsieve.common.constants import (
    CANDIDATE_COLUMNS,
    CENSUS_COLUMNS,
    DEFAULT_TEMPLATES_DIR,
    VERIFY_REPORT_TEMPLATE,
    Check,
)
from spinsieve.common.utils import format_int_list, format_rational
from spinsieve.common.weyl import InvolutionRecord
from spinsieve.scattered.sieve import SieveReport
from spinsieve.scattered.tables import VerificationSummary

logger = logging.getLogger(__name__)

UNVERIFIED_NOTE = "multiplicity and string limits: recorded, not verified"


def get_template(template_dir: str, template_filename) -> Template:

    template_path = Path(template_dir).joinpath(Path(template_filename))
    if not template_path.exists():
        raise FileNotFoundError(f"Template {template_path} not found")

    template: Template = Environment(
        loader=FileSystemLoader(template_dir)
    ).get_template(template_filename)

    return template


def _integral(values: Iterable[int]) -> list[int]:
    return [int(x) // 2 for x in values]


def involution_census_frame(records: Iterable[InvolutionRecord]) -> DataFrame:
    """One row per involution: sρ, a reduced word and I(s)."""

    rows = [
        {
            "srho": format_int_list(_integral(record.s_rho.doubled)),
            "word": format_int_list(record.element.word or ()),
            "fixed_set": format_int_list(sorted(record.fixed_set)),
        }
        for record in records
    ]
    return DataFrame(rows, columns=CENSUS_COLUMNS)


def fixed_set_distribution(records: Iterable[InvolutionRecord]) -> dict[int, int]:
    """Number of involutions per |I(s)|."""

    distribution: dict[int, int] = {}
    for record in records:
        size = len(record.fixed_set)
        distribution[size] = distribution.get(size, 0) + 1
    return dict(sorted(distribution.items()))


def candidate_census_frame(reports: Iterable[SieveReport]) -> DataFrame:
    """One row per candidate, ordered by sρ then by 2λ."""

    rows = []
    for report in reports:
        srho = format_int_list(_integral(report.s.s_rho.doubled))
        for candidate in report.candidates:
            rows.append(
                {
                    "srho": srho,
                    "lambda2": format_int_list(candidate.lam.doubled),
                    "lkt": format_int_list(_integral(candidate.lkt.doubled)),
                    "spin_norm_sq": format_rational(candidate.spin_norm_sq_of_lkt()),
                }
            )
    return DataFrame(rows, columns=CANDIDATE_COLUMNS)


def sieve_report_record(report: SieveReport) -> dict:
    return {
        "srho": _integral(report.s.s_rho.doubled),
        "candidates": [
            {
                "lambda2": list(candidate.lam.doubled),
                "lkt": _integral(candidate.lkt.doubled),
            }
            for candidate in report.candidates
        ],
        "bound": format_rational(report.bound_b),
        "box": list(report.enumeration_box),
        "truncated": report.truncated,
    }


def verification_records(summary: VerificationSummary) -> list[dict]:
    """Per-row check maps; None marks a check that did not apply."""

    records = []
    for report in summary.reports:
        records.append(
            {
                "row": report.row.row_id,
                "srho": _integral(report.row.s_rho.doubled),
                "lambda2": list(report.row.lam.doubled),
                "passed": report.passed,
                "checks": {str(check): report.checks.get(check) for check in Check},
                "bound_exempt": report.bound_exempt,
                "detail": report.detail,
                "note": report.row.note,
            }
        )
    return records


def verification_document(summary: VerificationSummary) -> dict:
    return {
        "passed": summary.passed,
        "total": summary.total,
        "unfolded": summary.unfolded_counts,
        "rows": verification_records(summary),
        "unverified": UNVERIFIED_NOTE,
    }


def _open_output(output: Path | None):
    if output is None:
        return sys.stdout
    output.parent.mkdir(parents=True, exist_ok=True)
    return open(output, "w", encoding="utf-8", newline="")


def write_frame(frame: DataFrame, output: Path | None = None) -> None:
    """Write a frame as TSV to ``output`` or stdout."""

    handle = _open_output(output)
    try:
        frame.to_csv(handle, sep="\t", index=False, lineterminator="\n")
    finally:
        if handle is not sys.stdout:
            handle.close()
    if output is not None:
        logger.info("Wrote %s rows to %s", len(frame), output)


def write_json_lines(records: Iterable[dict], output: Path | None = None) -> None:
    handle = _open_output(output)
    try:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    finally:
        if handle is not sys.stdout:
            handle.close()


def write_json(document: dict, output: Path | None = None) -> None:
    handle = _open_output(output)
    try:
        handle.write(json.dumps(document, indent=2, sort_keys=True) + "\n")
    finally:
        if handle is not sys.stdout:
            handle.close()


def render_verification_report(
    summary: VerificationSummary,
    output_filepath: str | Path,
    template_dir: str = DEFAULT_TEMPLATES_DIR,
    template_filename: str = VERIFY_REPORT_TEMPLATE,
) -> None:
    """Render the verification summary as a standalone HTML page."""

    template = get_template(template_dir, template_filename)
    output = template.render(
        passed=summary.passed,
        total=summary.total,
        unfolded=summary.unfolded_counts,
        checks=[str(check) for check in Check],
        rows=verification_records(summary),
        unverified=UNVERIFIED_NOTE,
    )

    output_path = Path(output_filepath)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as out_file:
        out_file.write(output)
    logger.info("Wrote verification report to %s", output_path)
