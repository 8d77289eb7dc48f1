"""Cartan data and exact weight arithmetic for simply-laced root systems.

Weights are written in the basis of fundamental weights and stored with doubled
integer coordinates, so half-integral weights are exact. The invariant form is
normalized so that every root has squared length 2, which gives ‖2ρ‖² = 798 for
E7. Nodes are numbered from 1 in Bourbaki order.
"""

import logging
import re
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import numpy as np
from sympy import Matrix

from spinsieve.common.exceptions import ConfigurationError, UsageError
from spinsieve.common.utils import format_vector, parse_rational_list

logger = logging.getLogger(__name__)

TYPE_LABEL_PATTERN = re.compile(r"^([ADE])_?(\d+)$")
SUPPORTED_RANKS: dict[str, range] = {
    "A": range(1, 8),
    "D": range(4, 8),
    "E": range(6, 8),
}


@dataclass(frozen=True)
class Weight:
    """A point of the half-integral weight lattice.

    ``doubled`` holds the coordinates of 2λ in the fundamental weight basis.
    """

    doubled: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "doubled", tuple(int(x) for x in self.doubled))

    @classmethod
    def from_coords(cls, coords: Iterable[int | Fraction | str]) -> "Weight":
        """Build a weight from its (half-integral) coordinates.

        Raises:
            UsageError: If a coordinate is not a multiple of 1/2.
        """
        doubled = []
        for coord in coords:
            value = 2 * Fraction(coord)
            if value.denominator != 1:
                raise UsageError(f"Coordinate {coord} is not a half-integer")
            doubled.append(value.numerator)
        return cls(tuple(doubled))

    @classmethod
    def parse(cls, text: str) -> "Weight":
        """Parse ``1,1/2,3/2`` (brackets and spaces tolerated)."""
        return cls.from_coords(parse_rational_list(text))

    @classmethod
    def zero(cls, rank: int) -> "Weight":
        return cls((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.doubled)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, 2) for x in self.doubled)

    @property
    def is_integral(self) -> bool:
        return all(x % 2 == 0 for x in self.doubled)

    @property
    def is_dominant(self) -> bool:
        return all(x >= 0 for x in self.doubled)

    @property
    def is_strictly_positive(self) -> bool:
        return all(x > 0 for x in self.doubled)

    def integral_coords(self) -> tuple[int, ...]:
        """Coordinates of an integral weight as plain integers."""
        if not self.is_integral:
            raise UsageError(f"Weight {self} is not integral")
        return tuple(x // 2 for x in self.doubled)

    def _same_rank(self, other: "Weight") -> None:
        if self.rank != other.rank:
            raise UsageError(
                f"Rank mismatch between {self} ({self.rank}) and {other} ({other.rank})"
            )

    def __add__(self, other: "Weight") -> "Weight":
        self._same_rank(other)
        return Weight(tuple(a + b for a, b in zip(self.doubled, other.doubled)))

    def __sub__(self, other: "Weight") -> "Weight":
        self._same_rank(other)
        return Weight(tuple(a - b for a, b in zip(self.doubled, other.doubled)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.doubled))

    def __mul__(self, scalar: int) -> "Weight":
        if not isinstance(scalar, int):
            return NotImplemented
        return Weight(tuple(scalar * a for a in self.doubled))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return format_vector(self.coords)


@dataclass(frozen=True, eq=False, repr=False)
class RootDatum:
    """Cartan data of a simply-laced root system.

    Instances are immutable and shared; obtain them with ``build_root_datum``.
    ``positive_roots`` are in the simple root basis, ``adjugate`` is
    ``determinant`` times the inverse Cartan matrix, and ``automorphism[i - 1]``
    is the image of node ``i`` under the diagram automorphism.
    """

    type_label: str
    cartan: np.ndarray
    positive_roots: tuple[tuple[int, ...], ...]
    inverse_cartan: tuple[tuple[Fraction, ...], ...]
    adjugate: np.ndarray
    determinant: int
    rho: Weight
    highest_root: Weight
    level_vector: tuple[int, ...]
    automorphism: tuple[int, ...]

    def __repr__(self) -> str:
        return f"RootDatum({self.type_label})"

    @property
    def rank(self) -> int:
        return len(self.cartan)

    def check(self, *weights: Weight) -> None:
        """Raise UsageError unless every weight has this datum's rank."""
        for weight in weights:
            if weight.rank != self.rank:
                raise UsageError(
                    f"{weight} has rank {weight.rank}, {self.type_label} needs {self.rank}"
                )

    def dynkin_diagram(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.rank + 1))
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                if self.cartan[i][j] != 0:
                    graph.add_edge(i + 1, j + 1)
        return graph

    def simple_root(self, index: int) -> Weight:
        """The simple root α_index in fundamental weight coordinates."""
        return Weight(tuple(2 * int(x) for x in self.cartan[index - 1]))

    def fundamental_weight(self, index: int) -> Weight:
        return Weight(tuple(2 * int(i == index - 1) for i in range(self.rank)))

    def scaled_pairing(self, m: Iterable[int], n: Iterable[int]) -> int:
        """``mᵀ adj n`` for integer coordinate vectors."""
        return int(np.asarray(tuple(m)) @ self.adjugate @ np.asarray(tuple(n)))

    def inner_product(self, mu: Weight, nu: Weight) -> Fraction:
        """The invariant form, normalized to ⟨α, α⟩ = 2 for every root."""
        self.check(mu, nu)
        return Fraction(
            self.scaled_pairing(mu.doubled, nu.doubled), 4 * self.determinant
        )

    def norm_sq(self, mu: Weight) -> Fraction:
        return self.inner_product(mu, mu)

    def to_simple_root_basis(self, mu: Weight) -> tuple[Fraction, ...]:
        """Coefficients c with μ = Σ c_i α_i."""
        self.check(mu)
        coords = mu.coords
        return tuple(
            sum((row[j] * coords[j] for j in range(self.rank)), Fraction(0))
            for row in self.inverse_cartan
        )

    def in_root_lattice(self, mu: Weight) -> bool:
        return all(c.denominator == 1 for c in self.to_simple_root_basis(mu))

    def reflect(self, mu: Weight, index: int) -> Weight:
        """Apply the simple reflection s_index."""
        coordinate = mu.doubled[index - 1]
        row = self.cartan[index - 1]
        return Weight(
            tuple(x - coordinate * int(row[j]) for j, x in enumerate(mu.doubled))
        )

    def root_pairing(self, mu: Weight, root: tuple[int, ...]) -> Fraction:
        """⟨μ, α⟩ for a root given in the simple root basis."""
        return Fraction(sum(r * x for r, x in zip(root, mu.doubled)), 2)

    def is_regular(self, mu: Weight) -> bool:
        """True iff μ lies on no root hyperplane."""
        self.check(mu)
        return all(self.root_pairing(mu, root) != 0 for root in self.positive_roots)

    def weyl_dimension(self, mu: Weight) -> int:
        """Dimension of the irreducible representation of highest weight μ.

        Raises:
            UsageError: If μ is not dominant and integral.
        """
        self.check(mu)
        if not (mu.is_dominant and mu.is_integral):
            raise UsageError(f"Weyl dimension needs a dominant integral weight: {mu}")
        shifted = mu + self.rho
        value = Fraction(1)
        for root in self.positive_roots:
            value *= self.root_pairing(shifted, root) / self.root_pairing(
                self.rho, root
            )
        if value.denominator != 1:
            raise ArithmeticError(f"Non-integral Weyl dimension {value} for {mu}")
        return value.numerator

    def height(self, mu: Weight) -> Fraction:
        """⟨μ, 2ρ∨⟩, an integer for integral μ."""
        self.check(mu)
        return Fraction(
            sum(x * level for x, level in zip(mu.doubled, self.level_vector)), 2
        )

    def is_u_small(self, mu: Weight) -> bool:
        """True iff the dominant weight μ lies in the convex hull of W·2ρ.

        Raises:
            UsageError: If μ is not dominant.
        """
        self.check(mu)
        if not mu.is_dominant:
            raise UsageError(f"u-smallness is defined for dominant weights, got {mu}")
        return all(c >= 0 for c in self.to_simple_root_basis(2 * self.rho - mu))


def parse_type_label(type_label: str) -> tuple[str, int]:
    """Split ``E7`` or ``D_6`` into family and rank.

    Raises:
        ConfigurationError: If the label is not a supported simply-laced type.
    """
    match = TYPE_LABEL_PATTERN.match(type_label.strip().upper())
    if not match:
        raise ConfigurationError(f"Unsupported root system label {type_label!r}")
    family, rank = match.group(1), int(match.group(2))
    if rank not in SUPPORTED_RANKS[family]:
        raise ConfigurationError(f"Unsupported root system label {type_label!r}")
    return family, rank


def _dynkin_edges(family: str, rank: int) -> list[tuple[int, int]]:
    if family == "A":
        return [(i, i + 1) for i in range(1, rank)]
    if family == "D":
        return [(i, i + 1) for i in range(1, rank - 1)] + [(rank - 2, rank)]
    # Bourbaki E: chain 1-3-4-5-6(-7) with node 2 attached to node 4.
    edges = [(1, 3), (2, 4)] + [(i, i + 1) for i in range(3, rank)]
    return edges


def _diagram_automorphism(family: str, rank: int) -> tuple[int, ...]:
    nodes = list(range(1, rank + 1))
    if family == "A":
        return tuple(reversed(nodes))
    if family == "D":
        return tuple(nodes[:-2] + [rank, rank - 1])
    if rank == 6:
        return (6, 2, 5, 4, 3, 1)
    return tuple(nodes)


def _positive_roots(cartan: np.ndarray) -> tuple[tuple[int, ...], ...]:
    """Close the simple roots under adding simple roots.

    For simply-laced types r + α_i is a root exactly when ⟨r, α_i⟩ = −1.
    """
    rank = len(cartan)
    layer = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    roots: set[tuple[int, ...]] = set(layer)
    while layer:
        next_layer: set[tuple[int, ...]] = set()
        for root in layer:
            pairings = np.asarray(root) @ cartan
            for i in range(rank):
                if pairings[i] == -1:
                    candidate = tuple(c + int(i == j) for j, c in enumerate(root))
                    if candidate not in roots:
                        next_layer.add(candidate)
        roots.update(next_layer)
        layer = sorted(next_layer)
    return tuple(sorted(roots, key=lambda root: (sum(root), root)))


def build_root_datum(type_label: str) -> RootDatum:
    """Build (once) the root datum of a supported simply-laced type.

    Labels are normalized first, so ``E7`` and ``e_7`` share one datum.
    """
    return _build_root_datum(*parse_type_label(type_label))


@lru_cache(maxsize=None)
def _build_root_datum(family: str, rank: int) -> RootDatum:
    label = f"{family}{rank}"

    cartan = 2 * np.eye(rank, dtype=np.int64)
    for i, j in _dynkin_edges(family, rank):
        cartan[i - 1][j - 1] = cartan[j - 1][i - 1] = -1

    symbolic = Matrix(cartan.tolist())
    determinant = int(symbolic.det())
    adjugate = np.array(symbolic.adjugate().tolist(), dtype=np.int64)
    inverse_cartan = tuple(
        tuple(Fraction(int(x), determinant) for x in row) for row in adjugate
    )

    cartan.setflags(write=False)
    adjugate.setflags(write=False)

    positive_roots = _positive_roots(cartan)
    dominant = [
        root for root in positive_roots if all(x >= 0 for x in np.asarray(root) @ cartan)
    ]
    if len(dominant) != 1:
        raise ArithmeticError(f"{label} has {len(dominant)} dominant roots")
    highest_root = Weight(tuple(2 * int(x) for x in np.asarray(dominant[0]) @ cartan))

    level_vector = []
    for i in range(rank):
        level = sum(2 * inverse_cartan[j][i] for j in range(rank))
        level_vector.append(int(level))

    datum = RootDatum(
        type_label=label,
        cartan=cartan,
        positive_roots=positive_roots,
        inverse_cartan=inverse_cartan,
        adjugate=adjugate,
        determinant=determinant,
        rho=Weight((2,) * rank),
        highest_root=highest_root,
        level_vector=tuple(level_vector),
        automorphism=_diagram_automorphism(family, rank),
    )
    logger.debug(
        "Built %s: %s positive roots, highest root %s",
        label,
        len(positive_roots),
        highest_root,
    )
    return datum
