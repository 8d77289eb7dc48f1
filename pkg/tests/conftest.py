"""Pytest configuration and shared fixtures."""

from pathlib import Path

import pytest

from spinsieve.common.rootsystem import RootDatum, Weight, build_root_datum
from spinsieve.common.weyl import InvolutionRecord, from_regular_image

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "spinsieve" / "scattered" / "data"
TEMPLATES_DIR = REPO_ROOT / "templates"


def _involution(datum: RootDatum, *s_rho: int) -> InvolutionRecord:
    """The involution with the given integer sρ."""
    element = from_regular_image(datum, Weight(tuple(2 * x for x in s_rho)))
    return InvolutionRecord.from_element(element)


@pytest.fixture
def e7() -> RootDatum:
    return build_root_datum("E7")


@pytest.fixture
def a2() -> RootDatum:
    return build_root_datum("A2")


@pytest.fixture
def a3() -> RootDatum:
    return build_root_datum("A3")


@pytest.fixture
def first_e7_involution(e7) -> InvolutionRecord:
    """The involution of the first row of the E7 table."""
    return _involution(e7, -2, 6, 7, -8, 6, 1, -3)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def templates_dir() -> Path:
    return TEMPLATES_DIR
