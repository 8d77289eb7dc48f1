import re
from collections.abc import Iterable
from fractions import Fraction

from spinsieve.common.exceptions import UsageError

WORD_SEPARATORS = re.compile(r"[\s,]+")


def format_rational(value: Fraction | int) -> str:
    """Render an exact number as ``p`` or ``p/q``."""

    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_vector(values: Iterable[Fraction | int], brackets: bool = True) -> str:
    """Render a vector of exact numbers, e.g. ``[1, 1/2, 1/2]``."""

    body = ", ".join(format_rational(value) for value in values)
    return f"[{body}]" if brackets else body


def format_int_list(values: Iterable[int]) -> str:
    """Comma separated integers without spaces, the TSV cell format."""

    return ",".join(str(int(value)) for value in values)


def parse_int_list(text: str) -> tuple[int, ...]:
    """Parse ``-2,6,7`` (brackets and spaces tolerated) into integers."""

    cleaned = text.strip().strip("[]").strip()
    if not cleaned:
        return ()
    try:
        return tuple(int(part) for part in WORD_SEPARATORS.split(cleaned) if part)
    except ValueError as ex:
        raise UsageError(f"Not a list of integers: {text!r}") from ex


def parse_rational_list(text: str) -> tuple[Fraction, ...]:
    """Parse ``1,1/2,3/2`` into fractions."""

    cleaned = text.strip().strip("[]").strip()
    if not cleaned:
        return ()
    try:
        return tuple(Fraction(part) for part in WORD_SEPARATORS.split(cleaned) if part)
    except (ValueError, ZeroDivisionError) as ex:
        raise UsageError(f"Not a list of rationals: {text!r}") from ex


def parse_word(text: str) -> tuple[int, ...]:
    """Parse a reduced word such as ``s1 s4 s2`` or ``1,4,2``."""

    cleaned = text.replace("s_", "").replace("s", "")
    return parse_int_list(cleaned)
