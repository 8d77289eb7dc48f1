"""Tests for spinsieve.scattered.tables."""

from fractions import Fraction

import pytest

from spinsieve.common.constants import DATASET_COLUMNS, Check
from spinsieve.common.exceptions import DatasetError
from spinsieve.common.rootsystem import Weight
from spinsieve.common.spin import pencil_min, spin_norm_sq
from spinsieve.scattered.tables import (
    ScatteredRow,
    load_dataset,
    unfold,
    verify_all,
    verify_row,
)

HEADER = "\t".join(DATASET_COLUMNS)
FIRST_E7_LINE = "E7\t1\t-2,6,7,-8,6,1,-3\t2,1,1,1,1,1,1\t1,1,0,2,1,1,1\t1\t0\tE6, 1st, g=-1"


def _write_dataset(directory, group, *lines):
    path = directory / f"{group}.tsv"
    path.write_text("\n".join([HEADER, *lines]) + "\n", encoding="utf-8")
    return directory


class TestLoadDataset:
    """Tests for load_dataset."""

    @pytest.mark.parametrize(("group", "count"), [("A6", 20), ("D6", 26), ("E7", 66)])
    def test_shipped_counts(self, data_dir, group, count):
        """Row counts of the shipped tables."""
        assert len(load_dataset(group, data_dir)) == count

    def test_first_e7_row(self, data_dir):
        """Cells are parsed into weights; λ is stored doubled."""
        row = load_dataset("E7", data_dir)[0]
        assert row.row_id == "E7:1:1"
        assert row.s_rho == Weight((-4, 12, 14, -16, 12, 2, -6))
        assert row.lam == Weight((2, 1, 1, 1, 1, 1, 1))
        assert row.spin_lkt.integral_coords() == (1, 1, 0, 2, 1, 1, 1)
        assert row.note == "E6, 1st, g=-1"
        assert not row.starred

    def test_positions_per_part(self, data_dir):
        """Rows are numbered within their part."""
        rows = load_dataset("E7", data_dir)
        ids = [row.row_id for row in rows]
        assert ids[43] == "E7:1:44"
        assert ids[44] == "E7:2:1"
        assert ids[-1] == "E7:2:22"
        assert rows[-1].is_trivial

    def test_environment_directory(self, monkeypatch, tmp_path):
        """The dataset directory can come from the environment."""
        _write_dataset(tmp_path, "E7", FIRST_E7_LINE)
        monkeypatch.setenv("DIRAC_SIEVE_DATA", str(tmp_path))
        assert len(load_dataset("E7")) == 1

    def test_missing_file(self, tmp_path):
        """A missing table is a dataset error."""
        with pytest.raises(DatasetError):
            load_dataset("E7", tmp_path)

    def test_missing_column(self, tmp_path):
        """Every column must be present."""
        (tmp_path / "E7.tsv").write_text("group\tpart\nE7\t1\n", encoding="utf-8")
        with pytest.raises(DatasetError, match="lacks columns"):
            load_dataset("E7", tmp_path)

    @pytest.mark.parametrize(
        "line",
        [
            "E7\t1\t-2,6,7\t2,1,1,1,1,1,1\t1,1,0,2,1,1,1\t1\t0\t",
            "E7\t1\t-2,6,7,-8,6,1,x\t2,1,1,1,1,1,1\t1,1,0,2,1,1,1\t1\t0\t",
            "D6\t1\t-2,6,7,-8,6,1,-3\t2,1,1,1,1,1,1\t1,1,0,2,1,1,1\t1\t0\t",
        ],
    )
    def test_malformed_rows(self, tmp_path, line):
        """Wrong rank, garbage cells and foreign groups are rejected."""
        _write_dataset(tmp_path, "E7", line)
        with pytest.raises(DatasetError):
            load_dataset("E7", tmp_path)

    def test_multiplicity_must_be_one(self, tmp_path):
        """Multiplicities other than one are rejected."""
        _write_dataset(tmp_path, "E7", FIRST_E7_LINE.replace("\t1\t0\t", "\t2\t0\t"))
        with pytest.raises(DatasetError, match="multiplicity"):
            load_dataset("E7", tmp_path)


class TestUnfold:
    """Tests for unfold."""

    @pytest.mark.parametrize(("group", "count"), [("A6", 32), ("D6", 34), ("E7", 66)])
    def test_unfolded_counts(self, data_dir, group, count):
        """Starred rows gain their diagram dual."""
        assert len(unfold(load_dataset(group, data_dir))) == count

    def test_dual_follows_starred_row(self, data_dir):
        """The dual is marked and placed right after its row."""
        rows = unfold(load_dataset("A6", data_dir))
        starred = next(i for i, row in enumerate(rows) if row.starred)
        dual = rows[starred + 1]
        assert dual.dual
        assert dual.row_id == rows[starred].row_id + "*"
        assert dual.s_rho.doubled == tuple(reversed(rows[starred].s_rho.doubled))

    def test_self_dual_star(self):
        """A starred row equal to its own dual is an error."""
        row = ScatteredRow(
            group="A2",
            part=1,
            position=1,
            s_rho=Weight((-2, -2)),
            lam=Weight((1, 1)),
            spin_lkt=Weight((0, 0)),
            mult=1,
            starred=True,
        )
        with pytest.raises(DatasetError, match="own dual"):
            unfold([row])


class TestVerifyRow:
    """Tests for verify_row."""

    def test_first_e7_row(self, data_dir):
        """The first E7 row passes every check, the sieve included."""
        report = verify_row(load_dataset("E7", data_dir)[0], sieve=True)
        assert report.passed
        assert report.checks[Check.SIEVE] is True
        assert report.checks[Check.BOUND] is True
        assert not report.bound_exempt

    def test_trivial_row_is_bound_exempt(self, data_dir):
        """λ = ρ skips the bound and is flagged."""
        report = verify_row(load_dataset("E7", data_dir)[-1], sieve=True)
        assert report.passed
        assert report.bound_exempt
        assert report.checks[Check.BOUND] is None
        assert Check.SIEVE not in report.checks

    def test_bound_not_applied_outside_e7(self, data_dir):
        """Groups without an explicit bound skip it without an exemption flag."""
        report = verify_row(load_dataset("A6", data_dir)[0])
        assert report.passed
        assert report.checks[Check.BOUND] is None
        assert not report.bound_exempt

    def test_corrupted_involution(self, data_dir):
        """A vector outside the orbit of ρ fails the first check."""
        row = load_dataset("E7", data_dir)[0]
        corrupted = ScatteredRow(**{**row.__dict__, "s_rho": Weight((-4, 12, 14, -16, 12, 0, -6))})
        report = verify_row(corrupted)
        assert not report.passed
        assert report.failures == [Check.INVOLUTION]
        assert report.detail

    def test_wrong_spin_lkt(self, data_dir):
        """A spin LKT of the wrong norm fails the spin norm check."""
        row = load_dataset("E7", data_dir)[0]
        corrupted = ScatteredRow(**{**row.__dict__, "spin_lkt": Weight((2,) * 7)})
        report = verify_row(corrupted)
        assert Check.SPIN_NORM in report.failures

    def test_a6_thirteenth_row_spin_lkt(self, data_dir):
        """A6:1:13 carries the pencil minimum reached from its printed weight."""
        row = load_dataset("A6", data_dir)[12]
        assert row.row_id == "A6:1:13"
        assert row.spin_lkt == Weight((2, 0, 0, 0, 0, 10))
        report = verify_row(row)
        assert report.checks[Check.SPIN_NORM] is True
        assert report.checks[Check.U_SMALL] is True
        assert report.passed

        datum = row.datum
        assert spin_norm_sq(datum, row.spin_lkt) == Fraction(586, 7)
        printed = Weight((0, 0, 0, 0, 0, 8))
        assert spin_norm_sq(datum, printed) == Fraction(628, 7)
        query = pencil_min(datum, printed)
        assert query.result_min_norm_sq == Fraction(586, 7)
        assert query.achieved_at_n == 1


class TestVerifyAll:
    """Tests for verify_all."""

    def test_single_group_headline(self, data_dir):
        """One passing group reports its unfolded size."""
        summary = verify_all(["A6"], data_dir)
        assert summary.ok
        assert summary.headline() == "20 rows, unfold=32"

    def test_all_groups_without_sieve(self, data_dir):
        """Every shipped row passes."""
        summary = verify_all(data_dir=data_dir, sieve=False)
        assert summary.headline() == "112/112 rows pass"
        assert summary.unfolded_counts == {"A6": 32, "D6": 34, "E7": 66}

    @pytest.mark.slow
    def test_e7_with_sieve(self, data_dir):
        """Every non-trivial E7 row is reached by the sieve of its involution."""
        summary = verify_all(["E7"], data_dir, sieve=True)
        assert summary.headline() == "66 rows, unfold=66"
