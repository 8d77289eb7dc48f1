"""Shipped scattered-representation datasets and their verification suite.

Each dataset is a TSV with one row per scattered representation. Weights are
comma separated integers: ``srho`` and ``spin_lkt`` in fundamental weight
coordinates, ``lambda2`` doubled. ``part`` is the printed table the row belongs
to and rows are numbered from 1 within their part. Multiplicities and the
string-limit notes are recorded, not verified.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

from pandas import DataFrame, read_csv

from spinsieve.common.config import resolve_data_dir
from spinsieve.common.constants import (
    DATASET_COLUMNS,
    DATASET_GROUPS,
    DEFAULT_BOUNDS,
    Check,
)
from spinsieve.common.exceptions import DatasetError, NotInOrbitError, UsageError
from spinsieve.common.rootsystem import RootDatum, Weight, build_root_datum
from spinsieve.common.spin import spin_norm_sq
from spinsieve.common.utils import parse_int_list
from spinsieve.common.weyl import InvolutionRecord, diagram_dual, from_regular_image
from spinsieve.scattered.sieve import (
    Parameter,
    default_bound,
    lambda_in_lambda_s,
    sieve_admits,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScatteredRow:
    """One row of a scattered-part table."""

    group: str
    part: int
    position: int
    s_rho: Weight
    lam: Weight
    spin_lkt: Weight
    mult: int
    starred: bool
    note: str = ""
    dual: bool = False

    @property
    def row_id(self) -> str:
        suffix = "*" if self.dual else ""
        return f"{self.group}:{self.part}:{self.position}{suffix}"

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.s_rho.doubled, self.lam.doubled

    @property
    def datum(self) -> RootDatum:
        return build_root_datum(self.group)

    @property
    def is_trivial(self) -> bool:
        """The trivial representation: λ = ρ."""
        return self.lam == self.datum.rho


def _weight_cell(value: str, doubled: bool) -> Weight:
    coords = parse_int_list(value)
    return Weight(coords if doubled else tuple(2 * x for x in coords))


def _parse_row(group: str, record: dict, positions: dict[int, int], line: int) -> ScatteredRow:
    try:
        if record["group"] != group:
            raise ValueError(f"group {record['group']!r} in the {group} dataset")
        part = int(record["part"])
        positions[part] = positions.get(part, 0) + 1
        row = ScatteredRow(
            group=group,
            part=part,
            position=positions[part],
            s_rho=_weight_cell(record["srho"], doubled=False),
            lam=_weight_cell(record["lambda2"], doubled=True),
            spin_lkt=_weight_cell(record["spin_lkt"], doubled=False),
            mult=int(record["mult"]),
            starred=record["star"] == "1",
            note=record["note"] or "",
        )
        row.datum.check(row.s_rho, row.lam, row.spin_lkt)
    except (KeyError, ValueError, UsageError) as ex:
        raise DatasetError(f"{group} dataset line {line}: {ex}") from ex

    if row.mult != 1:
        raise DatasetError(f"{row.row_id}: multiplicity {row.mult}, expected 1")
    return row


def load_dataset(group: str, data_dir: str | Path | None = None) -> list[ScatteredRow]:
    """Load and validate the dataset of one group.

    Raises:
        DatasetError: If the file is missing or any row is malformed.
    """
    path = resolve_data_dir(data_dir) / f"{group}.tsv"
    try:
        frame: DataFrame = read_csv(path, sep="\t", dtype=str, keep_default_na=False)
    except (OSError, ValueError) as ex:
        raise DatasetError(f"Could not read dataset {path}: {ex}") from ex

    missing = [column for column in DATASET_COLUMNS if column not in frame.columns]
    if missing:
        raise DatasetError(f"Dataset {path} lacks columns {missing}")

    positions: dict[int, int] = {}
    rows = [
        _parse_row(group, record, positions, line)
        for line, record in enumerate(frame.to_dict("records"), start=2)
    ]
    logger.debug("Loaded %s rows from %s", len(rows), path)
    return rows


def unfold(rows: Iterable[ScatteredRow]) -> list[ScatteredRow]:
    """Add the diagram dual after every starred row.

    Raises:
        DatasetError: If a starred row is its own dual.
    """
    unfolded = []
    for row in rows:
        unfolded.append(row)
        if not row.starred:
            continue
        datum = row.datum
        dual = ScatteredRow(
            group=row.group,
            part=row.part,
            position=row.position,
            s_rho=diagram_dual(datum, row.s_rho),
            lam=diagram_dual(datum, row.lam),
            spin_lkt=diagram_dual(datum, row.spin_lkt),
            mult=row.mult,
            starred=False,
            note=row.note,
            dual=True,
        )
        if dual.key == row.key:
            raise DatasetError(f"{row.row_id} is starred but equals its own dual")
        unfolded.append(dual)
    return unfolded


@dataclass
class VerificationReport:
    """Outcome of every check on one row; None marks a check that did not apply."""

    row: ScatteredRow
    checks: dict[Check, bool | None] = field(default_factory=dict)
    bound_exempt: bool = False
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.checks.get(Check.INVOLUTION) is True and all(
            result is not False for result in self.checks.values()
        )

    @property
    def failures(self) -> list[Check]:
        return [check for check, result in self.checks.items() if result is False]


def verify_row(row: ScatteredRow, sieve: bool = False) -> VerificationReport:
    """Run every applicable check on one row.

    The sieve bound applies to groups with an explicit default bound (E7); the
    trivial representation is exempt from it and flagged. With ``sieve`` the
    row must also be reached by the candidate sieve of its involution.
    """
    datum = row.datum
    report = VerificationReport(row)
    checks = report.checks

    try:
        s = InvolutionRecord.from_element(from_regular_image(datum, row.s_rho))
    except (NotInOrbitError, UsageError) as ex:
        checks[Check.INVOLUTION] = False
        report.detail = str(ex)
        return report
    checks[Check.INVOLUTION] = True
    checks[Check.SCATTERED] = s.is_scattered
    checks[Check.MEMBERSHIP] = lambda_in_lambda_s(s, row.lam)

    parameter = Parameter(s, row.lam)
    bounded = datum.type_label in DEFAULT_BOUNDS
    if row.is_trivial or not bounded:
        checks[Check.BOUND] = None
        report.bound_exempt = bounded
    else:
        checks[Check.BOUND] = datum.norm_sq(parameter.lambda_minus) <= default_bound(datum)

    lkt_ok = row.spin_lkt.is_dominant and row.spin_lkt.is_integral
    checks[Check.DOMINANCE] = lkt_ok and parameter.lkt.is_integral
    if lkt_ok:
        checks[Check.SPIN_NORM] = spin_norm_sq(datum, row.spin_lkt) == datum.norm_sq(
            parameter.two_lambda
        )
        checks[Check.U_SMALL] = datum.is_u_small(row.spin_lkt)
    else:
        checks[Check.SPIN_NORM] = checks[Check.U_SMALL] = None

    if sieve and checks[Check.BOUND] is not None:
        sievable = checks[Check.SCATTERED] and checks[Check.MEMBERSHIP]
        checks[Check.SIEVE] = bool(sievable) and sieve_admits(parameter)

    if not report.passed:
        logger.debug("%s failed %s", row.row_id, [str(c) for c in report.failures])
    return report


@dataclass
class VerificationSummary:
    """Per-group reports and unfolded row counts."""

    reports: list[VerificationReport]
    unfolded_counts: dict[str, int]

    @property
    def passed(self) -> int:
        return sum(report.passed for report in self.reports)

    @property
    def total(self) -> int:
        return len(self.reports)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def headline(self) -> str:
        groups = list(self.unfolded_counts)
        if len(groups) == 1 and self.ok:
            return f"{self.total} rows, unfold={self.unfolded_counts[groups[0]]}"
        return f"{self.passed}/{self.total} rows pass"


def verify_all(
    groups: Iterable[str] = DATASET_GROUPS,
    data_dir: str | Path | None = None,
    sieve: bool = True,
) -> VerificationSummary:
    """Verify every row of the given datasets, unfolding starred rows.

    Non-trivial E7 rows are also checked against the candidate sieve.
    """
    reports = []
    unfolded_counts = {}
    for group in groups:
        rows = load_dataset(group, data_dir)
        unfolded_counts[group] = len(unfold(rows))
        group_reports = [verify_row(row, sieve=sieve) for row in rows]
        logger.info(
            "%s: %s/%s rows pass, %s after unfolding",
            group,
            sum(report.passed for report in group_reports),
            len(rows),
            unfolded_counts[group],
        )
        reports.extend(group_reports)
    return VerificationSummary(reports, unfolded_counts)
