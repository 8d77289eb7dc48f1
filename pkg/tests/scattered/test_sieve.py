"""Tests for spinsieve.scattered.sieve."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinsieve.common.exceptions import UsageError
from spinsieve.common.rootsystem import Weight, build_root_datum
from spinsieve.common.spin import pencil_min
from spinsieve.common.weyl import (
    InvolutionRecord,
    diagram_dual,
    enumerate_involutions,
    from_word,
    longest_element,
    make_dominant,
)
from spinsieve.scattered.sieve import (
    Parameter,
    SearchPlan,
    default_bound,
    dominate_rows,
    enumerate_candidates,
    lambda_in_lambda_s,
    sieve_admits,
    sieve_all,
    validate_candidate,
)
from spinsieve.scattered.tables import load_dataset
from tests.conftest import _involution

FIRST_ROW_CANDIDATES = [
    (1, 1, 2, 1, 1, 1, 1),
    (2, 1, 1, 1, 1, 1, 1),
    (2, 1, 1, 1, 1, 1, 3),
    (2, 1, 1, 1, 2, 1, 2),
    (2, 3, 1, 1, 1, 1, 1),
    (3, 1, 2, 1, 1, 1, 1),
]


def _brute_force(s: InvolutionRecord, box: tuple[int, ...], bound: Fraction) -> list[tuple[int, ...]]:
    """Every doubled λ in the box meeting the defining conditions."""
    datum = s.datum
    found = []
    for doubled in itertools.product(*(range(1, limit + 1) for limit in box)):
        parameter = Parameter(s, Weight(doubled))
        if not lambda_in_lambda_s(s, parameter.lam):
            continue
        if datum.norm_sq(parameter.lambda_minus) > bound:
            continue
        if datum.norm_sq(parameter.two_lambda) <= pencil_min(datum, parameter.lkt).result_min_norm_sq:
            found.append(doubled)
    return found


class TestParameter:
    """Tests for Parameter and Λ(s) membership."""

    def test_first_row(self, first_e7_involution):
        """λ+sλ, λ−sλ and the LKT of the first E7 table row."""
        parameter = Parameter(first_e7_involution, Weight((2, 1, 1, 1, 1, 1, 1)))
        datum = parameter.datum
        assert parameter.is_scattered
        assert parameter.lkt.is_dominant
        assert datum.inner_product(parameter.lambda_plus, parameter.lambda_minus) == 0
        assert datum.norm_sq(parameter.two_lambda) == datum.norm_sq(
            parameter.lambda_plus
        ) + datum.norm_sq(parameter.lambda_minus)

    def test_rank_checked(self, first_e7_involution):
        """λ must have the rank of s."""
        with pytest.raises(UsageError):
            Parameter(first_e7_involution, Weight((1, 1)))

    def test_membership(self, first_e7_involution):
        """2λ must be positive and λ+sλ integral."""
        assert lambda_in_lambda_s(first_e7_involution, Weight((2, 1, 1, 1, 1, 1, 1)))
        assert not lambda_in_lambda_s(first_e7_involution, Weight((0, 1, 1, 1, 1, 1, 1)))

    def test_dual_parameter(self):
        """The dual of a parameter dualizes both s and λ."""
        a3 = build_root_datum("A3")
        w0 = InvolutionRecord.from_element(longest_element(a3))
        parameter = Parameter(w0, Weight((1, 2, 3)))
        dual = diagram_dual(a3, parameter)
        assert dual.lam == Weight((3, 2, 1))
        assert dual.s == diagram_dual(a3, w0)


class TestBounds:
    """Tests for default_bound and validate_candidate."""

    def test_default_bounds(self, e7, a3):
        """464 for E7, ‖2ρ‖² elsewhere."""
        assert default_bound(e7) == 464
        assert default_bound(a3) == 20
        assert default_bound(build_root_datum("A6")) == 112

    @pytest.mark.parametrize("doubled", FIRST_ROW_CANDIDATES)
    def test_first_row_candidates_validate(self, first_e7_involution, doubled):
        """Every candidate of the first row passes the exact re-check."""
        assert validate_candidate(Parameter(first_e7_involution, Weight(doubled))) == []

    def test_tight_bound(self, first_e7_involution):
        """A bound below ‖λ−sλ‖² is reported."""
        parameter = Parameter(first_e7_involution, Weight((2, 1, 1, 1, 1, 1, 1)))
        assert validate_candidate(parameter, bound_b=1) == ["bound"]

    def test_membership_failure_short_circuits(self, first_e7_involution):
        """Non-members fail with membership alone."""
        parameter = Parameter(first_e7_involution, Weight((0, 1, 1, 1, 1, 1, 1)))
        assert validate_candidate(parameter) == ["membership"]

    def test_trivial_representation_exceeds_bound(self, e7):
        """λ = ρ for s = w0 has ‖λ−sλ‖² = 798 > 464."""
        w0 = InvolutionRecord.from_element(longest_element(e7))
        parameter = Parameter(w0, e7.rho)
        assert "bound" in validate_candidate(parameter)
        assert not sieve_admits(parameter)


class TestDominateRows:
    """Tests for the batched dominance map."""

    @settings(max_examples=50, deadline=None)
    @given(
        rows=st.lists(
            st.lists(st.integers(-5, 5), min_size=7, max_size=7), min_size=1, max_size=8
        )
    )
    def test_matches_make_dominant(self, rows):
        """Each row agrees with make_dominant."""
        e7 = build_root_datum("E7")
        points = np.array(rows, dtype=np.int64)
        dominated = dominate_rows(e7, points)
        for row, result in zip(rows, dominated):
            expected, _ = make_dominant(e7, Weight(tuple(2 * x for x in row)))
            assert tuple(2 * int(x) for x in result) == expected.doubled

    def test_does_not_modify_input(self, a2):
        """The input array is left alone."""
        points = np.array([[-1, 0]], dtype=np.int64)
        dominate_rows(a2, points)
        assert points.tolist() == [[-1, 0]]


class TestSearchPlan:
    """Tests for the search box and the single-branch walk."""

    def test_scattered_box_is_proven(self, first_e7_involution):
        """Empty I(s) gives a finite box inside the coordinate cap."""
        plan = SearchPlan(first_e7_involution, Fraction(464))
        assert not plan.truncated
        assert (plan.box >= 1).all()
        assert (plan.box <= 128).all()

    def test_fixed_node_truncates(self, a2):
        """Non-empty I(s) leaves a coordinate unbounded."""
        s1 = InvolutionRecord.from_element(from_word(a2, (1,)))
        plan = SearchPlan(s1, Fraction(8), max_coordinate=10)
        assert plan.truncated
        assert plan.box.max() == 10

    @pytest.mark.parametrize("doubled", FIRST_ROW_CANDIDATES)
    def test_admits_candidates(self, first_e7_involution, doubled):
        """The single-branch walk reaches every candidate."""
        assert sieve_admits(Parameter(first_e7_involution, Weight(doubled)))

    def test_rejects_non_candidate(self, first_e7_involution):
        """2λ = ρ is not a candidate of the first row."""
        assert not sieve_admits(Parameter(first_e7_involution, Weight((1,) * 7)))


class TestEnumerateCandidates:
    """Tests for the full sieve."""

    def test_first_e7_row(self, e7, first_e7_involution):
        """The first E7 involution has exactly six candidates."""
        report = enumerate_candidates(e7, first_e7_involution)
        assert [p.lam.doubled for p in report.candidates] == FIRST_ROW_CANDIDATES
        assert report.bound_b == 464
        assert not report.truncated
        assert all(validate_candidate(p) == [] for p in report.candidates)

    @pytest.mark.parametrize("label", ["A2", "A3"])
    def test_matches_brute_force(self, label):
        """On small groups the sieve agrees with scanning its box."""
        datum = build_root_datum(label)
        bound = default_bound(datum)
        for s in enumerate_involutions(datum):
            if not s.is_scattered:
                continue
            report = enumerate_candidates(datum, s)
            assert not report.truncated
            expected = _brute_force(s, report.enumeration_box, bound)
            assert [p.lam.doubled for p in report.candidates] == sorted(expected)

    def test_truncated_report(self, a2):
        """Clipped searches are flagged, not hidden."""
        s1 = InvolutionRecord.from_element(from_word(a2, (1,)))
        report = enumerate_candidates(a2, s1, max_coordinate=6)
        assert report.truncated
        assert report.enumeration_box[1] == 6

    def test_wrong_group(self, a2, first_e7_involution):
        """The involution must belong to the datum."""
        with pytest.raises(UsageError):
            enumerate_candidates(a2, first_e7_involution)

    def test_non_positive_bound(self, e7, first_e7_involution):
        """B must be positive."""
        with pytest.raises(UsageError):
            enumerate_candidates(e7, first_e7_involution, bound_b=0)

    @pytest.mark.slow
    def test_long_word_row(self, e7):
        """The first row of the second E7 table has 241 candidates."""
        s = _involution(e7, -17, -1, 15, -1, -1, -1, -1)
        report = enumerate_candidates(e7, s)
        assert len(report.candidates) == 241
        assert Weight((1, 2, 1, 2, 2, 2, 2)) in {p.lam for p in report.candidates}
        assert all(validate_candidate(p) == [] for p in report.candidates)

    @pytest.mark.slow
    def test_longest_element(self, e7):
        """w0 has 116 candidates and the trivial representation is not among them."""
        w0 = InvolutionRecord.from_element(longest_element(e7))
        report = enumerate_candidates(e7, w0)
        assert len(report.candidates) == 116
        assert e7.rho not in {p.lam for p in report.candidates}
        assert all(validate_candidate(p) == [] for p in report.candidates)

    @pytest.mark.slow
    def test_longest_element_matches_brute_force(self, e7):
        """The pruned search for w0 finds exactly what scanning its box finds."""
        w0 = InvolutionRecord.from_element(longest_element(e7))
        report = enumerate_candidates(e7, w0)
        assert not report.truncated
        expected = _brute_force(w0, report.enumeration_box, default_bound(e7))
        assert len(expected) == 116
        assert [p.lam.doubled for p in report.candidates] == sorted(expected)


class TestSieveAll:
    """Tests for the census over every involution."""

    def test_workers_agree(self, a3):
        """One and two workers give identical, ordered reports."""
        involutions = enumerate_involutions(a3)
        serial = sieve_all(a3, involutions, workers=1)
        parallel = sieve_all(a3, involutions, workers=2)
        assert list(serial) == list(parallel)
        for s in serial:
            assert serial[s].candidates == parallel[s].candidates
        keys = [s.sort_key for s in serial]
        assert keys == sorted(keys)

    def test_only_scattered(self, a3):
        """Involutions with non-empty I(s) are skipped."""
        reports = sieve_all(a3, enumerate_involutions(a3))
        assert all(s.is_scattered for s in reports)
        assert reports

    @pytest.mark.slow
    def test_e7_census(self, e7, data_dir):
        """The full E7 census: every candidate sound, every table row reached."""
        reports = sieve_all(e7, enumerate_involutions(e7), workers=4)
        assert len(reports) == 8479
        assert not any(report.truncated for report in reports.values())

        by_s_rho = {s.s_rho: report for s, report in reports.items()}
        first = by_s_rho[Weight((-4, 12, 14, -16, 12, 2, -6))]
        assert [p.lam.doubled for p in first.candidates] == FIRST_ROW_CANDIDATES
        assert len(by_s_rho[Weight((-34, -2, 30, -2, -2, -2, -2))].candidates) == 241
        assert len(by_s_rho[-e7.rho].candidates) == 116

        found = set()
        for report in reports.values():
            for p in report.candidates:
                assert validate_candidate(p) == []
                found.add((p.s.s_rho, p.lam))
        for row in load_dataset("E7", data_dir):
            if not row.is_trivial:
                assert (row.s_rho, row.lam) in found, row.row_id
