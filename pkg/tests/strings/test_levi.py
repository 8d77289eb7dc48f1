"""Tests for spinsieve.strings.levi."""

import json
import logging
from math import comb

import pytest

from spinsieve.common.config import PACKAGE_CONSTANTS_PATH
from spinsieve.common.exceptions import ConstantsError, UsageError
from spinsieve.common.rootsystem import build_root_datum
from spinsieve.common.weyl import from_word
from spinsieve.strings.levi import (
    StringConstants,
    classify,
    classify_levi_subsets,
    coefficient_table,
    count_strings,
    embed_levi_involution,
    format_coefficient_line,
    format_type_key,
    load_constants,
)


@pytest.fixture
def constants() -> StringConstants:
    return load_constants(PACKAGE_CONSTANTS_PATH)


def _write_constants(path, values: dict[str, int]):
    path.write_text(
        json.dumps({label: {"value": v, "source": "test"} for label, v in values.items()}),
        encoding="utf-8",
    )
    return path


class TestClassify:
    """Tests for the component classification and node maps."""

    @pytest.mark.parametrize(
        ("nodes", "type_label", "node_map"),
        [
            ({1, 3, 4, 5, 6, 7}, "A6", (1, 3, 4, 5, 6, 7)),
            ({2, 3, 4, 5}, "D4", (5, 4, 3, 2)),
            ({1, 2, 3, 4, 5}, "D5", (1, 3, 4, 5, 2)),
            ({2, 3, 4, 5, 6, 7}, "D6", (7, 6, 5, 4, 3, 2)),
            ({1, 2, 3, 4, 5, 6}, "E6", (1, 2, 3, 4, 5, 6)),
            ({1, 2, 3, 4, 5, 6, 7}, "E7", (1, 2, 3, 4, 5, 6, 7)),
            ({2, 4, 5}, "A3", (2, 4, 5)),
        ],
    )
    def test_connected(self, e7, nodes, type_label, node_map):
        """Connected subdiagrams of E7 and their Bourbaki labels."""
        levi = classify(e7, nodes)
        assert len(levi.components) == 1
        assert levi.components[0].type_label == type_label
        assert levi.components[0].node_map == node_map

    def test_components_and_key(self, e7):
        """{1, 2, 3, 5, 6} is A2 + A2 + A1 ordered largest first."""
        levi = classify(e7, {1, 2, 3, 5, 6})
        assert levi.type_key == ("A2", "A2", "A1")
        assert levi.component_of(5).nodes == frozenset({5, 6})
        with pytest.raises(UsageError):
            levi.component_of(4)

    def test_outside_diagram(self, e7):
        """Nodes must lie in 1..rank."""
        with pytest.raises(UsageError):
            classify(e7, {0, 1})

    def test_all_subsets(self, e7):
        """Every subset is classified once."""
        subsets = classify_levi_subsets(e7)
        assert len(subsets) == 128
        assert subsets[0].type_key == ()
        assert subsets[-1].type_key == ("E7",)


class TestCoefficients:
    """Tests for the Levi type counts."""

    def test_format_type_key(self):
        """Four or more copies collapse to a power."""
        assert format_type_key(()) == "empty"
        assert format_type_key(("A2", "A1", "A1")) == "A2A1A1"
        assert format_type_key(("A1",) * 4) == "A1^4"

    def test_size_four(self, e7):
        """Subsets of size four, in the canonical order."""
        line = format_coefficient_line(coefficient_table(e7)[4])
        assert line == "D4:1 A4:5 A3A1:11 A2A1A1:12 A2A2:4 A1^4:2"

    @pytest.mark.parametrize(
        ("size", "line"),
        [(0, "empty:1"), (1, "A1:7"), (2, "A2:6 A1A1:15"), (3, "A3:6 A2A1:18 A1A1A1:11"), (7, "E7:1")],
    )
    def test_small_sizes(self, e7, size, line):
        """The lines that pin down N_A1, N_A2 and N_A3."""
        assert format_coefficient_line(coefficient_table(e7)[size]) == line

    @pytest.mark.parametrize("label", ["A4", "D5", "E6", "E7"])
    def test_binomial_totals(self, label):
        """Each size accounts for every subset of that size."""
        datum = build_root_datum(label)
        table = coefficient_table(datum)
        for size, coefficients in table.items():
            assert sum(coefficients.values()) == comb(datum.rank, size)


class TestConstants:
    """Tests for loading the per-type constants."""

    def test_shipped(self, constants):
        """All ten types are present with a source."""
        assert constants.missing() == []
        assert constants.values["E6"] == 33
        assert all(constants.sources.values())

    def test_malformed(self, tmp_path):
        """Entries without an integer value or a source are reported together."""
        path = tmp_path / "constants.json"
        path.write_text(
            json.dumps({"A1": {"value": "one", "source": "x"}, "A2": {"value": 2}}),
            encoding="utf-8",
        )
        with pytest.raises(ConstantsError) as excinfo:
            load_constants(path)
        assert len(excinfo.value.problems) == 2

    def test_not_json(self, tmp_path):
        """Unreadable files are constants errors."""
        path = tmp_path / "constants.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConstantsError):
            load_constants(path)


class TestCountStrings:
    """Tests for count_strings."""

    def test_e7_counts(self, e7, constants):
        """The shipped constants reproduce the published counts."""
        counts, total = count_strings(e7, constants)
        assert counts == (1, 7, 27, 71, 135, 181, 156)
        assert total == 578

    def test_missing_constant(self, e7, constants):
        """Every type on a proper Levi subset needs a value."""
        values = dict(constants.values)
        del values["D6"]
        with pytest.raises(ConstantsError, match="D6"):
            count_strings(e7, StringConstants(values, constants.sources))

    def test_inconsistent_strict(self, e7, tmp_path, constants):
        """A wrong N_A4 contradicts the published N_4, N_5 and N_6."""
        values = {**constants.values, "A4": 9}
        path = _write_constants(tmp_path / "constants.json", values)
        with pytest.raises(ConstantsError) as excinfo:
            count_strings(e7, load_constants(path))
        assert excinfo.value.problems

    def test_inconsistent_lenient(self, e7, tmp_path, constants, caplog):
        """Without strict checking the mismatch is only logged."""
        values = {**constants.values, "A4": 9}
        path = _write_constants(tmp_path / "constants.json", values)
        with caplog.at_level(logging.WARNING):
            counts, _ = count_strings(e7, load_constants(path), strict=False)
        assert counts[4] == 140
        assert "N_4 = 140, expected 135" in caplog.text

    def test_pinned_value(self, e7, constants):
        """Pinned constants are checked even when the totals are not involved."""
        values = {**constants.values, "A6": 31}
        with pytest.raises(ConstantsError) as excinfo:
            count_strings(e7, StringConstants(values, constants.sources))
        assert "N_A6 = 31, expected 32" in excinfo.value.problems


class TestEmbedding:
    """Tests for embed_levi_involution."""

    def test_d6_into_e7(self, e7):
        """A D6 word embedded on nodes 2..7 through the D6 node map."""
        levi = classify(e7, range(2, 8))
        d6 = build_root_datum("D6")
        element = from_word(d6, (1, 2, 4, 3, 2, 1, 6, 5, 4))
        embedded = embed_levi_involution(e7, levi, [element])
        assert embedded.element.word == (7, 6, 4, 5, 6, 7, 2, 3, 4)
        assert embedded.s_rho.integral_coords() == (3, 5, 5, -7, 5, 1, -3)

    def test_wrong_component_type(self, e7):
        """Elements must belong to their component's type."""
        levi = classify(e7, range(2, 8))
        with pytest.raises(UsageError):
            embed_levi_involution(e7, levi, [from_word(build_root_datum("A6"), (1,))])

    def test_component_count(self, e7):
        """One element per component."""
        levi = classify(e7, {1, 2})
        with pytest.raises(UsageError):
            embed_levi_involution(e7, levi, [])
