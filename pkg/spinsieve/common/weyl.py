"""Weyl group elements, enumeration of the group and its involutions, duality.

Elements are integer matrices acting on fundamental weight coordinates. Since ρ
is regular, an element is determined by its image wρ, which is the key used
throughout: the group is enumerated as the orbit of ρ.
"""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from spinsieve.common.exceptions import NotInOrbitError, UsageError
from spinsieve.common.rootsystem import RootDatum, Weight

logger = logging.getLogger(__name__)

# Entries of Weyl group matrices in the fundamental weight basis stay small for
# every supported type.
MATRIX_DTYPE = np.int8
POINT_DTYPE = np.int32


@dataclass(frozen=True, eq=False, repr=False)
class WeylElement:
    """A Weyl group element as a matrix on fundamental weight coordinates.

    ``word`` is a (not necessarily reduced) word whose rightmost letter acts
    first; it is None when the element was built from a matrix alone.
    """

    datum: RootDatum
    matrix: np.ndarray
    word: tuple[int, ...] | None = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.int64)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.word is not None:
            object.__setattr__(self, "word", tuple(int(i) for i in self.word))

    @classmethod
    def identity(cls, datum: RootDatum) -> "WeylElement":
        return cls(datum, np.eye(datum.rank, dtype=np.int64), ())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.datum.type_label == other.datum.type_label and np.array_equal(
            self.matrix, other.matrix
        )

    def __hash__(self) -> int:
        return hash((self.datum.type_label, self.matrix.tobytes()))

    def __repr__(self) -> str:
        return f"WeylElement({self.datum.type_label}, rho -> {self(self.datum.rho)})"

    def __call__(self, mu: Weight) -> Weight:
        self.datum.check(mu)
        return Weight(tuple(int(x) for x in self.matrix @ np.asarray(mu.doubled)))

    def __matmul__(self, other: "WeylElement") -> "WeylElement":
        word = None
        if self.word is not None and other.word is not None:
            word = self.word + other.word
        return WeylElement(self.datum, self.matrix @ other.matrix, word)

    def inverse(self) -> "WeylElement":
        if self.word is not None:
            return from_word(self.datum, tuple(reversed(self.word)))
        # W preserves the form with Gram matrix C⁻¹, so M⁻¹ = C Mᵀ C⁻¹.
        scaled = self.datum.cartan @ self.matrix.T @ self.datum.adjugate
        inverse, remainder = np.divmod(scaled, self.datum.determinant)
        if remainder.any():
            raise ArithmeticError(f"{self!r} does not preserve the invariant form")
        return WeylElement(self.datum, inverse)

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(self.datum.rank)))

    @property
    def is_involution(self) -> bool:
        return bool(np.array_equal(self.matrix @ self.matrix, np.eye(self.datum.rank)))

    @property
    def fixed_set(self) -> frozenset[int]:
        """Nodes i with w·ϖ_i = ϖ_i."""
        identity = np.eye(self.datum.rank, dtype=np.int64)
        return frozenset(
            i + 1
            for i in range(self.datum.rank)
            if np.array_equal(self.matrix[:, i], identity[:, i])
        )


@dataclass(frozen=True)
class InvolutionRecord:
    """An involution s together with sρ and I(s)."""

    element: WeylElement
    s_rho: Weight
    fixed_set: frozenset[int]

    def __post_init__(self):
        if not self.element.is_involution:
            raise UsageError(f"{self.element!r} is not an involution")

    @classmethod
    def from_element(cls, element: WeylElement) -> "InvolutionRecord":
        return cls(
            element=element,
            s_rho=element(element.datum.rho),
            fixed_set=element.fixed_set,
        )

    @property
    def datum(self) -> RootDatum:
        return self.element.datum

    @property
    def is_scattered(self) -> bool:
        return not self.fixed_set

    @property
    def sort_key(self) -> tuple[int, ...]:
        return self.s_rho.doubled


@dataclass(frozen=True)
class GroupLayer:
    """All elements of one length: their images of ρ and their matrices."""

    length: int
    points: np.ndarray
    matrices: np.ndarray


def simple_reflection_matrix(datum: RootDatum, index: int) -> np.ndarray:
    """Matrix of s_index: λ ↦ λ − λ_index · (row index of the Cartan matrix)."""

    if not 1 <= index <= datum.rank:
        raise UsageError(f"Simple reflection index {index} outside 1..{datum.rank}")
    matrix = np.eye(datum.rank, dtype=np.int64)
    matrix[:, index - 1] -= datum.cartan[index - 1]
    return matrix


def from_word(datum: RootDatum, word: Iterable[int]) -> WeylElement:
    """Compose simple reflections; the rightmost letter acts first.

    Raises:
        UsageError: If a letter is outside 1..rank.
    """
    letters = tuple(int(i) for i in word)
    matrix = np.eye(datum.rank, dtype=np.int64)
    for index in letters:
        matrix = matrix @ simple_reflection_matrix(datum, index)
    return WeylElement(datum, matrix, letters)


def _reflect_to_dominant(datum: RootDatum, mu: Weight) -> tuple[Weight, list[int]]:
    """Reflect at the first negative coordinate until none is left."""

    applied: list[int] = []
    current = mu
    while not current.is_dominant:
        index = next(i for i, x in enumerate(current.doubled) if x < 0) + 1
        current = datum.reflect(current, index)
        applied.append(index)
    return current, applied


def make_dominant(datum: RootDatum, mu: Weight) -> tuple[Weight, WeylElement]:
    """Return ({μ}, w) with w·μ = {μ} dominant."""

    datum.check(mu)
    dominant, applied = _reflect_to_dominant(datum, mu)
    return dominant, from_word(datum, reversed(applied))


def from_regular_image(datum: RootDatum, v: Weight) -> WeylElement:
    """The unique w with w·ρ = v.

    Raises:
        NotInOrbitError: If v is not in the Weyl group orbit of ρ.
    """
    datum.check(v)
    dominant, applied = _reflect_to_dominant(datum, v)
    if dominant != datum.rho:
        raise NotInOrbitError(
            f"{v} is not in the orbit of rho for {datum.type_label} "
            f"(dominant conjugate {dominant})"
        )
    return from_word(datum, applied)


def longest_element(
    datum: RootDatum, nodes: Iterable[int] | None = None
) -> WeylElement:
    """w0 of the parabolic subgroup generated by ``nodes`` (all nodes by default)."""

    support = set(range(1, datum.rank + 1) if nodes is None else nodes)
    applied: list[int] = []
    current = datum.rho
    while True:
        positive = [i for i in sorted(support) if current.doubled[i - 1] > 0]
        if not positive:
            break
        current = datum.reflect(current, positive[0])
        applied.append(positive[0])
    return from_word(datum, reversed(applied))


def conjugate(w: WeylElement, s: WeylElement) -> WeylElement:
    """w·s·w⁻¹."""
    if w.datum.type_label != s.datum.type_label:
        raise UsageError(
            f"Cannot conjugate {s.datum.type_label} by {w.datum.type_label}"
        )
    return w @ s @ w.inverse()


def enumerate_group(
    datum: RootDatum, visitor: Callable[[GroupLayer], None] | None = None
) -> int:
    """Breadth-first search of the orbit of ρ, one length at a time.

    s_i·w is longer than w exactly when (wρ)_i > 0, so each layer is generated
    from the previous one alone; duplicates inside a layer are removed with
    ``np.unique``, which also fixes a deterministic (sorted) order.

    Returns:
        The group order.
    """
    rank = datum.rank
    cartan = datum.cartan.astype(np.int32)
    points = np.ones((1, rank), dtype=POINT_DTYPE)
    matrices = np.eye(rank, dtype=MATRIX_DTYPE)[None, :, :]
    length = 0
    total = 0

    while len(points):
        if visitor is not None:
            visitor(GroupLayer(length, points, matrices))
        total += len(points)

        next_points: list[np.ndarray] = []
        next_matrices: list[np.ndarray] = []
        for i in range(rank):
            mask = points[:, i] > 0
            if not mask.any():
                continue
            layer_points = points[mask]
            layer_matrices = matrices[mask].astype(np.int32)
            next_points.append(layer_points - layer_points[:, i : i + 1] * cartan[i])
            next_matrices.append(
                layer_matrices
                - cartan[i][None, :, None] * layer_matrices[:, i : i + 1, :]
            )
        if not next_points:
            break

        stacked = np.concatenate(next_points).astype(POINT_DTYPE)
        points, first = np.unique(stacked, axis=0, return_index=True)
        matrices = np.concatenate(next_matrices)[first].astype(MATRIX_DTYPE)
        length += 1
        logger.debug("%s: %s elements of length %s", datum.type_label, len(points), length)

    logger.info("Enumerated %s elements of W(%s)", total, datum.type_label)
    return total


def enumerate_involutions(datum: RootDatum) -> list[InvolutionRecord]:
    """All involutions of W, sorted lexicographically by sρ."""

    identity = np.eye(datum.rank, dtype=np.int32)
    found: list[np.ndarray] = []

    def collect(layer: GroupLayer) -> None:
        matrices = layer.matrices.astype(np.int32)
        squares = np.einsum("nij,njk->nik", matrices, matrices)
        mask = (squares == identity).all(axis=(1, 2))
        if mask.any():
            found.append(layer.points[mask])

    enumerate_group(datum, collect)

    records = []
    for point in np.concatenate(found) if found else []:
        element = from_regular_image(datum, Weight(tuple(2 * int(x) for x in point)))
        records.append(InvolutionRecord.from_element(element))
    records.sort(key=lambda record: record.sort_key)
    logger.info(
        "%s involutions in W(%s), %s with empty I(s)",
        len(records),
        datum.type_label,
        sum(record.is_scattered for record in records),
    )
    return records


@singledispatch
def dual_of(x: object, datum: RootDatum) -> object:
    """Image of ``x`` under the Dynkin diagram automorphism of ``datum``."""
    raise UsageError(f"No diagram dual defined for {type(x).__name__}")


@dual_of.register
def _(x: Weight, datum: RootDatum) -> Weight:
    datum.check(x)
    doubled = [0] * datum.rank
    for i, image in enumerate(datum.automorphism):
        doubled[image - 1] = x.doubled[i]
    return Weight(tuple(doubled))


@dual_of.register
def _(x: WeylElement, datum: RootDatum) -> WeylElement:
    permutation = np.zeros((datum.rank, datum.rank), dtype=np.int64)
    for i, image in enumerate(datum.automorphism):
        permutation[image - 1][i] = 1
    word = None
    if x.word is not None:
        word = tuple(datum.automorphism[i - 1] for i in x.word)
    return WeylElement(datum, permutation @ x.matrix @ permutation.T, word)


@dual_of.register
def _(x: InvolutionRecord, datum: RootDatum) -> InvolutionRecord:
    return InvolutionRecord.from_element(dual_of(x.element, datum))


def diagram_dual(datum: RootDatum, x):
    """Apply the diagram automorphism to a weight, element, involution or parameter.

    Reversal for A_n, the swap of the two fork nodes for D_n, 1↔6 and 3↔5 for E6
    (Bourbaki labels) and the identity for E7.
    """
    return dual_of(x, datum)
