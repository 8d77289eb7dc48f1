"""String families and their limits.

A scattered representation of each factor of a Levi subset L gives a string
J(λ, −sλ) of the full group: s is the Levi involution embedded through the node
maps, λ carries the factor's values on L, and every node outside L is a free
coordinate λ_k = v/2 with v ∈ ℙ. Substituting a non-positive v leaves the
parameter domain; conjugating back with simple reflections either reaches a
scattered parameter (a string limit) or lands on a wall.
"""

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cache

from sympy import Expr, Matrix, Rational, Symbol, expand

from spinsieve.common.exceptions import UsageError
from spinsieve.common.rootsystem import RootDatum, Weight, build_root_datum
from spinsieve.common.weyl import (
    InvolutionRecord,
    WeylElement,
    diagram_dual,
    from_regular_image,
    from_word,
    longest_element,
)
from spinsieve.scattered.sieve import Parameter
from spinsieve.scattered.tables import ScatteredRow
from spinsieve.strings.levi import LeviSubset, classify, embed_levi_involution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LeviFactor:
    """A scattered representation on one Levi component, in the component's labels.

    ``s_rho`` (integer coordinates) and ``lambda2`` (doubled coordinates) are
    both None for the trivial representation.
    """

    nodes: frozenset[int]
    s_rho: tuple[int, ...] | None = None
    lambda2: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        if (self.s_rho is None) != (self.lambda2 is None):
            raise UsageError("A Levi factor needs both s rho and 2 lambda, or neither")

    @property
    def is_trivial(self) -> bool:
        return self.s_rho is None


@dataclass(frozen=True, eq=False)
class StringFamily:
    """The string attached to scattered data on the factors of a Levi subset."""

    name: str
    datum: RootDatum
    levi: LeviSubset
    factors: tuple[LeviFactor, ...]
    s_embedded: InvolutionRecord
    fixed_pattern: tuple[tuple[int, int], ...]
    free_slots: tuple[int, ...]
    symbols: tuple[Symbol, ...]
    description: str = ""
    _plus: tuple[Expr, ...] = field(init=False, repr=False)
    _minus: tuple[Expr, ...] = field(init=False, repr=False)

    def __post_init__(self):
        lam = Matrix(self.symbolic_lambda())
        reflected = Matrix(self.s_embedded.element.matrix.tolist()) * lam
        plus = tuple(expand(x) for x in lam + reflected)
        minus = tuple(expand(x) for x in lam - reflected)
        if any(x.free_symbols for x in minus):
            raise UsageError(f"{self.name}: λ − sλ depends on the free coordinates")
        object.__setattr__(self, "_plus", plus)
        object.__setattr__(self, "_minus", minus)

    def symbolic_lambda(self) -> list[Expr]:
        values: dict[int, Expr] = {
            node: Rational(doubled, 2) for node, doubled in self.fixed_pattern
        }
        for node, symbol in zip(self.free_slots, self.symbols):
            values[node] = symbol / 2
        return [values[node] for node in range(1, self.datum.rank + 1)]

    def symbolic_form(self) -> tuple[tuple[Expr, ...], tuple[Expr, ...]]:
        """(λ+sλ, λ−sλ) as affine expressions in the free symbols."""
        return self._plus, self._minus

    def _free_values(self, values: int | Sequence[int] | Mapping[str, int]) -> list[int]:
        if isinstance(values, int):
            values = [values]
        if isinstance(values, Mapping):
            try:
                values = [values[symbol.name] for symbol in self.symbols]
            except KeyError as ex:
                raise UsageError(f"{self.name}: no value for {ex}") from ex
        values = [int(v) for v in values]
        if len(values) != len(self.free_slots):
            raise UsageError(
                f"{self.name} has {len(self.free_slots)} free coordinate(s), "
                + f"got {len(values)} value(s)"
            )
        return values

    def evaluate(self, values: int | Sequence[int] | Mapping[str, int]) -> Parameter:
        """The parameter at the given free values v (λ_k = v/2)."""

        doubled = dict(self.fixed_pattern)
        doubled.update(zip(self.free_slots, self._free_values(values)))
        lam = Weight(tuple(doubled[node] for node in range(1, self.datum.rank + 1)))
        return Parameter(self.s_embedded, lam)


def _factor_element(datum: RootDatum, factor: LeviFactor) -> tuple[WeylElement, tuple[int, ...]]:
    if factor.is_trivial:
        return longest_element(datum), (2,) * datum.rank
    s_rho = Weight(tuple(2 * x for x in factor.s_rho or ()))
    return from_regular_image(datum, s_rho), tuple(factor.lambda2 or ())


def build_family(
    name: str,
    factors: Iterable[LeviFactor],
    variables: str | Sequence[str] | None = None,
    datum: RootDatum | None = None,
    description: str = "",
) -> StringFamily:
    """Assemble the string family of scattered data on the factors of a Levi subset.

    Raises:
        UsageError: If the factors do not match the components of their union.
        NotInOrbitError: If a factor's sρ is not in the orbit of ρ.
    """
    datum = datum or build_root_datum("E7")
    factors = tuple(factors)
    levi = classify(datum, set().union(*(factor.nodes for factor in factors)))

    by_nodes = {factor.nodes: factor for factor in factors}
    if len(by_nodes) != len(factors) or set(by_nodes) != {c.nodes for c in levi.components}:
        raise UsageError(
            f"{name}: factors {[sorted(f.nodes) for f in factors]} are not the "
            + f"components of {sorted(levi.nodes)}"
        )

    elements = []
    pattern: dict[int, int] = {}
    for component in levi.components:
        factor = by_nodes[component.nodes]
        component_datum = build_root_datum(component.type_label)
        element, lambda2 = _factor_element(component_datum, factor)
        component_datum.check(Weight(lambda2))
        elements.append(element)
        for label, doubled in enumerate(lambda2, start=1):
            pattern[component.node_map[label - 1]] = doubled

    s = embed_levi_involution(datum, levi, elements)
    free_slots = tuple(n for n in range(1, datum.rank + 1) if n not in levi.nodes)
    if variables is None:
        names = [f"x{node}" for node in free_slots]
    elif isinstance(variables, str):
        names = [variables] if len(free_slots) == 1 else variables.split()
    else:
        names = list(variables)
    if len(names) != len(free_slots):
        raise UsageError(f"{name}: {len(free_slots)} free coordinate(s), names {names}")

    return StringFamily(
        name=name,
        datum=datum,
        levi=levi,
        factors=tuple(by_nodes[c.nodes] for c in levi.components),
        s_embedded=s,
        fixed_pattern=tuple(sorted(pattern.items())),
        free_slots=free_slots,
        symbols=tuple(Symbol(n) for n in names),
        description=description,
    )


def normalize_limit(s: InvolutionRecord, lam: Weight) -> Parameter | None:
    """Conjugate (s, λ) by the reflections taking λ to its dominant chamber.

    Returns:
        The parameter (wsw⁻¹, wλ), or None if wλ lies on a wall.
    """
    datum = s.datum
    element = s.element
    current = lam
    while not current.is_dominant:
        index = next(i for i, x in enumerate(current.doubled) if x < 0) + 1
        reflection = from_word(datum, (index,))
        current = datum.reflect(current, index)
        element = reflection @ element @ reflection
    if not current.is_strictly_positive:
        return None
    return Parameter(InvolutionRecord.from_element(element), current)


def string_limit(
    family: StringFamily, value: int | Sequence[int] | Mapping[str, int]
) -> Parameter | None:
    """The limit of the string at a free value leaving the parameter domain.

    Raises:
        UsageError: If λ is still strictly positive, i.e. a member of the string.
    """
    parameter = family.evaluate(value)
    if parameter.lam.is_strictly_positive:
        raise UsageError(f"{family.name} at {value} is a member of the string, not a limit")
    limit = normalize_limit(parameter.s, parameter.lam)
    logger.debug("%s at %s: limit %s", family.name, value, limit and limit.key)
    return limit


def match_table_row(parameter: Parameter, rows: Iterable[ScatteredRow]) -> ScatteredRow | None:
    """The row with the same (sρ, λ), if any."""

    key = parameter.key
    return next((row for row in rows if row.key == key), None)


@dataclass(frozen=True)
class LimitMatch:
    value: int
    limit: Parameter | None
    row: ScatteredRow | None


def scan_limits(
    family: StringFamily, values: Iterable[int], rows: Sequence[ScatteredRow]
) -> list[LimitMatch]:
    """string_limit over the given free values, each matched against ``rows``."""

    matches = []
    for value in values:
        limit = string_limit(family, value)
        row = match_table_row(limit, rows) if limit is not None else None
        matches.append(LimitMatch(value, limit, row))
    return matches


def family_dual(family: StringFamily) -> StringFamily:
    """Apply each factor's diagram automorphism to its scattered data."""

    factors = []
    for component in family.levi.components:
        factor = next(f for f in family.factors if f.nodes == component.nodes)
        if factor.is_trivial:
            factors.append(factor)
            continue
        component_datum = build_root_datum(component.type_label)
        s_rho = diagram_dual(component_datum, Weight(tuple(2 * x for x in factor.s_rho or ())))
        lam = diagram_dual(component_datum, Weight(tuple(factor.lambda2 or ())))
        factors.append(LeviFactor(factor.nodes, tuple(x // 2 for x in s_rho.doubled), lam.doubled))

    return build_family(
        f"{family.name}-dual",
        factors,
        [symbol.name for symbol in family.symbols],
        family.datum,
        family.description,
    )


E6_NODES = frozenset(range(1, 7))
D6_NODES = frozenset(range(2, 8))
A6_NODES = frozenset((1, 3, 4, 5, 6, 7))

# The constructible E7 string families: name -> (factors, free variable, description).
EXAMPLE_FAMILY_DATA: dict[str, tuple[tuple[LeviFactor, ...], str, str]] = {
    "d6-1st": (
        (LeviFactor(D6_NODES, (-3, 1, 5, -7, 5, 5), (1, 1, 1, 1, 1, 1)),),
        "a",
        "first scattered D6 representation, free coordinate at node 1",
    ),
    "e6-1st": (
        (LeviFactor(E6_NODES, (-2, 5, 6, -7, 6, -2), (2, 1, 1, 1, 1, 2)),),
        "g",
        "first scattered E6 representation, free coordinate at node 7",
    ),
    "e6-trivial": (
        (LeviFactor(E6_NODES),),
        "g",
        "trivial E6 representation, free coordinate at node 7",
    ),
    "a6-13th": (
        (LeviFactor(A6_NODES, (-2, -1, -1, -1, 4, -5), (2, 2, 2, 2, 1, 1)),),
        "b",
        "13th scattered A6 representation, free coordinate at node 2",
    ),
    "a6-13th-dual": (
        (LeviFactor(A6_NODES, (-5, 4, -1, -1, -1, -2), (1, 1, 2, 2, 2, 2)),),
        "b",
        "dual of the 13th scattered A6 representation",
    ),
    "d6-19th": (
        (LeviFactor(D6_NODES, (-2, 4, -5, 4, -6, -2), (2, 1, 1, 1, 1, 2)),),
        "a",
        "19th scattered D6 representation, free coordinate at node 1",
    ),
    "d6-19th-dual": (
        (LeviFactor(D6_NODES, (-2, 4, -5, 4, -2, -6), (2, 1, 1, 1, 2, 1)),),
        "a",
        "dual of the 19th scattered D6 representation",
    ),
    "d5a1-trivial": (
        (LeviFactor(frozenset(range(1, 6))), LeviFactor(frozenset((7,)))),
        "f",
        "trivial representations on D5 and A1, free coordinate at node 6",
    ),
}
EXAMPLE_FAMILIES: tuple[str, ...] = tuple(EXAMPLE_FAMILY_DATA)


@cache
def example_family(name: str) -> StringFamily:
    """Build one of EXAMPLE_FAMILIES.

    Raises:
        UsageError: If the name is unknown.
    """
    if name not in EXAMPLE_FAMILY_DATA:
        raise UsageError(
            f"Unknown string family {name!r}; choose one of {', '.join(EXAMPLE_FAMILIES)}"
        )
    factors, variable, description = EXAMPLE_FAMILY_DATA[name]
    return build_family(name, factors, variable, description=description)
