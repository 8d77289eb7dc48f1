"""The candidate sieve for scattered parameters.

For an involution s with empty I(s) the sieve collects every λ ∈ Λ(s) with
‖λ−sλ‖² ≤ B and ‖2λ‖² ≤ P²_{λ+sλ}. The search runs over the doubled coordinates
m = 2λ ∈ ℙ^rank, one coordinate at a time from the last node to the first:

* c = C⁻¹(m − sm)/2 are the simple root coefficients of λ − sλ. They are
  nonnegative and bounded by Cauchy-Schwarz, which bounds every coordinate of m
  through a nonnegative integer matrix (the search box).
* ‖λ−sλ‖² is a positive semidefinite quadratic form in m. Its LDL factorization
  bounds each coordinate given the later ones.
* The parity conditions of Λ(s) are put in echelon form over GF(2), so a
  coordinate's parity is fixed as soon as the later ones are known.

The tree is expanded with numpy, block by block. Leaves are filtered with exact
integer arithmetic, first by the two necessary conditions ‖λ−sλ‖² ≤
4‖ρ‖(‖λ+sλ‖+‖ρ‖) and ‖2λ‖² ≤ ‖{λ+sλ}‖²_spin, then by the exact pencil minimum.
"""

import logging
import math
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from spinsieve.common.constants import (
    DEFAULT_BOUNDS,
    DEFAULT_MAX_COORDINATE,
    SIEVE_CHUNK_ROWS,
)
from spinsieve.common.exceptions import UsageError
from spinsieve.common.rootsystem import RootDatum, Weight, build_root_datum
from spinsieve.common.spin import pencil_min, spin_norm_sq
from spinsieve.common.weyl import (
    InvolutionRecord,
    dual_of,
    from_regular_image,
    make_dominant,
)

logger = logging.getLogger(__name__)

# Zero pivots of the LDL factorization (the fixed space of s).
PIVOT_EPSILON = 1e-9
# Widening of every float interval; the exact re-check removes the extra points.
RADIUS_SLACK = 1e-6


@dataclass(frozen=True)
class Parameter:
    """The parameter (s, λ) of J(λ, −sλ)."""

    s: InvolutionRecord
    lam: Weight

    def __post_init__(self):
        self.s.datum.check(self.lam)

    @property
    def datum(self) -> RootDatum:
        return self.s.datum

    @cached_property
    def lambda_plus(self) -> Weight:
        return self.lam + self.s.element(self.lam)

    @cached_property
    def lambda_minus(self) -> Weight:
        return self.lam - self.s.element(self.lam)

    @cached_property
    def lkt(self) -> Weight:
        """The lowest K-type {λ+sλ}."""
        return make_dominant(self.datum, self.lambda_plus)[0]

    @property
    def two_lambda(self) -> Weight:
        return 2 * self.lam

    @property
    def is_scattered(self) -> bool:
        return self.s.is_scattered

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.s.s_rho.doubled, self.lam.doubled

    def spin_norm_sq_of_lkt(self) -> Fraction:
        return spin_norm_sq(self.datum, self.lkt)


@dual_of.register
def _(x: Parameter, datum: RootDatum) -> Parameter:
    return Parameter(dual_of(x.s, datum), dual_of(x.lam, datum))


@dataclass
class SieveReport:
    """Result of the sieve for one involution."""

    s: InvolutionRecord
    candidates: list[Parameter]
    bound_b: Fraction
    enumeration_box: tuple[int, ...]
    truncated: bool
    leaves: int = 0

    def __post_init__(self):
        self.candidates = sorted(self.candidates, key=lambda p: p.lam.doubled)


def default_bound(datum: RootDatum) -> Fraction:
    """464 for E7, ‖2ρ‖² otherwise."""
    return DEFAULT_BOUNDS.get(datum.type_label, datum.norm_sq(2 * datum.rho))


def lambda_in_lambda_s(s: InvolutionRecord, lam: Weight) -> bool:
    """Membership in Λ(s): 2λ_i ∈ ℙ, λ+sλ integral, λ−sλ ∈ ℕ-span of simple roots."""

    datum = s.datum
    datum.check(lam)
    if not lam.is_strictly_positive:
        return False
    image = s.element(lam)
    if not (lam + image).is_integral:
        return False
    coefficients = datum.to_simple_root_basis(lam - image)
    return all(c.denominator == 1 and c >= 0 for c in coefficients)


def validate_candidate(
    parameter: Parameter, bound_b: Fraction | int | None = None
) -> list[str]:
    """Independent re-check of a sieve candidate with Fraction arithmetic.

    Returns:
        The names of the failed conditions; empty when the candidate is sound.
    """
    datum = parameter.datum
    bound = default_bound(datum) if bound_b is None else Fraction(bound_b)
    failures = []
    if not lambda_in_lambda_s(parameter.s, parameter.lam):
        failures.append("membership")
        return failures
    plus, minus = parameter.lambda_plus, parameter.lambda_minus
    if datum.inner_product(plus, minus) != 0:
        failures.append("orthogonality")
    two_lambda_sq = datum.norm_sq(parameter.two_lambda)
    if two_lambda_sq != datum.norm_sq(plus) + datum.norm_sq(minus):
        failures.append("pythagoras")
    if datum.norm_sq(minus) > bound:
        failures.append("bound")
    if two_lambda_sq > pencil_min(datum, parameter.lkt).result_min_norm_sq:
        failures.append("pencil")
    return failures


def _parity_echelon(rows: np.ndarray) -> dict[int, np.ndarray]:
    """Echelon form over GF(2) keyed by each row's lowest odd column."""

    rows = rows % 2
    used: set[int] = set()
    pivots: dict[int, int] = {}
    for column in range(rows.shape[1]):
        pivot = next(
            (r for r in range(len(rows)) if r not in used and rows[r][column]), None
        )
        if pivot is None:
            continue
        used.add(pivot)
        pivots[column] = pivot
        for r in range(len(rows)):
            if r != pivot and rows[r][column]:
                rows[r] = (rows[r] + rows[pivot]) % 2
    return {column: rows[pivot].copy() for column, pivot in pivots.items()}


def dominate_rows(datum: RootDatum, points: np.ndarray) -> np.ndarray:
    """Batched make_dominant on integer coordinate rows."""

    points = points.copy()
    cartan = datum.cartan.astype(np.int64)
    active = np.nonzero((points < 0).any(axis=1))[0]
    while active.size:
        rows = points[active]
        index = np.argmax(rows < 0, axis=1)
        rows -= rows[np.arange(len(rows)), index][:, None] * cartan[index]
        points[active] = rows
        active = active[(rows < 0).any(axis=1)]
    return points


@dataclass
class _Block:
    """Partial assignments: columns above the current level are fixed."""

    m: np.ndarray
    partial: np.ndarray
    acc: np.ndarray

    def rows(self, rows: slice) -> "_Block":
        return _Block(self.m[rows], self.partial[rows], self.acc[rows])


@dataclass
class SearchPlan:
    """Everything the lattice search needs for one involution."""

    s: InvolutionRecord
    bound_b: Fraction
    max_coordinate: int = DEFAULT_MAX_COORDINATE
    box: np.ndarray = field(init=False)
    truncated: bool = field(init=False)

    def __post_init__(self):
        datum = self.s.datum
        rank = datum.rank
        self.datum = datum
        self.reflection = self.s.element.matrix.astype(np.int64)

        scaled = datum.adjugate @ (np.eye(rank, dtype=np.int64) - self.reflection)
        difference, remainder = np.divmod(scaled, datum.determinant)
        if remainder.any() or (difference < 0).any():
            raise ArithmeticError(f"C⁻¹(I−s) is not a nonnegative integer matrix for {self.s}")
        # Column k: simple root coefficients of ϖ_k − sϖ_k.
        self.difference = difference

        self.bound_floor = math.floor(self.bound_b)
        caps = []
        for j in range(rank):
            # c_j = ⟨λ−sλ, ϖ_j⟩ ≤ ‖λ−sλ‖ ‖ϖ_j‖
            caps.append(2 * math.isqrt(math.floor(self.bound_b * datum.inverse_cartan[j][j])))
        self.twice_caps = np.array(caps, dtype=np.int64)

        ones_below = np.cumsum(difference, axis=1) - difference
        self.min_below = ones_below

        box = []
        truncated = False
        for k in range(rank):
            column = difference[:, k]
            limits = [
                (self.twice_caps[j] - (difference[j].sum() - column[j])) // column[j]
                for j in range(rank)
                if column[j] > 0
            ]
            limit = min(limits) if limits else None
            if limit is None or limit > self.max_coordinate:
                truncated = True
                limit = self.max_coordinate
            box.append(int(limit))
        self.box = np.array(box, dtype=np.int64)
        self.truncated = truncated

        gram = (difference.T @ datum.cartan @ difference).astype(float) / 4.0
        self.pivots, self.ldl = self._ldl(gram)

        parity_rows = np.concatenate(
            [(np.eye(rank, dtype=np.int64) + self.reflection), difference]
        )
        self.parity = _parity_echelon(parity_rows)

        self.rho_scaled = 4 * int(np.ones(rank, dtype=np.int64) @ datum.adjugate @ np.ones(rank, dtype=np.int64))

    @staticmethod
    def _ldl(gram: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gram = gram.copy()
        rank = len(gram)
        pivots = np.zeros(rank)
        ldl = np.zeros((rank, rank))
        for i in range(rank):
            if gram[i][i] > PIVOT_EPSILON:
                pivots[i] = gram[i][i]
                ldl[i, i + 1 :] = gram[i, i + 1 :] / gram[i][i]
                gram[i + 1 :, i + 1 :] -= pivots[i] * np.outer(ldl[i, i + 1 :], ldl[i, i + 1 :])
        return pivots, ldl

    def root(self) -> _Block:
        rank = self.datum.rank
        return _Block(
            np.zeros((1, rank), dtype=np.int64),
            np.zeros((1, rank), dtype=np.int64),
            np.zeros(1),
        )

    def intervals(
        self, block: _Block, k: int
    ) -> tuple[np.ndarray, int, np.ndarray, np.ndarray]:
        """Admissible values of coordinate k: (low, step, counts, center) per row."""

        size = len(block.m)
        column = self.difference[:, k]
        high = np.full(size, self.box[k], dtype=np.int64)
        for j in np.nonzero(column > 0)[0]:
            room = self.twice_caps[j] - block.partial[:, j] - self.min_below[j, k]
            high = np.minimum(high, room // column[j])
        low = np.ones(size, dtype=np.int64)

        center = np.zeros(size)
        if self.pivots[k] > 0:
            center = block.m[:, k + 1 :] @ self.ldl[k, k + 1 :]
            slack = np.maximum(float(self.bound_b) - block.acc, 0.0)
            radius = np.sqrt(slack / self.pivots[k]) + RADIUS_SLACK
            low = np.maximum(low, np.ceil(-center - radius).astype(np.int64))
            high = np.minimum(high, np.floor(-center + radius).astype(np.int64))

        step = 1
        if k in self.parity:
            parity = (block.m[:, k + 1 :] @ self.parity[k][k + 1 :]) % 2
            low = low + (low - parity) % 2
            step = 2

        counts = np.where(high >= low, (high - low) // step + 1, 0)
        return low, step, counts, center

    def expand(
        self,
        block: _Block,
        k: int,
        low: np.ndarray,
        step: int,
        counts: np.ndarray,
        center: np.ndarray,
    ) -> _Block:
        """Children of ``block`` with coordinate k assigned."""

        parents = np.repeat(np.arange(len(block.m)), counts)
        offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        values = low[parents] + step * offsets

        m = block.m[parents]
        m[:, k] = values
        column = self.difference[:, k]
        partial = block.partial[parents] + values[:, None] * column[None, :]
        acc = block.acc[parents]
        if self.pivots[k] > 0:
            acc = acc + self.pivots[k] * (values + center[parents]) ** 2
        return _Block(m, partial, acc)

    def leaves(self) -> Iterator[np.ndarray]:
        """Blocks of complete assignments, depth first."""
        yield from self._walk(self.root(), self.datum.rank - 1)

    def _walk(self, block: _Block, k: int) -> Iterator[np.ndarray]:
        if k < 0:
            yield block.m
            return
        low, step, counts, center = self.intervals(block, k)
        # Bound the size of every expansion.
        cumulative = np.cumsum(counts)
        start = 0
        while start < len(block.m):
            base = cumulative[start - 1] if start else 0
            stop = int(np.searchsorted(cumulative, base + SIEVE_CHUNK_ROWS, side="right"))
            stop = max(stop, start + 1)
            rows = slice(start, stop)
            child = self.expand(
                block.rows(rows), k, low[rows], step, counts[rows], center[rows]
            )
            if len(child.m):
                yield from self._walk(child, k - 1)
            start = stop

    def admits(self, m: np.ndarray) -> bool:
        """True iff the search reaches the leaf m and the leaf screen keeps it."""

        m = np.asarray(m, dtype=np.int64)
        block = self.root()
        for k in reversed(range(self.datum.rank)):
            low, step, counts, center = self.intervals(block, k)
            value = int(m[k])
            offset = value - int(low[0])
            if offset < 0 or offset % step or offset // step >= counts[0]:
                return False
            block = self.expand(
                block, k, np.array([value]), 1, np.ones(1, dtype=np.int64), center
            )
        return len(self.screen(block.m)) == 1

    def screen(self, m: np.ndarray) -> np.ndarray:
        """Exact vectorized necessary conditions; returns the surviving rows."""

        datum = self.datum
        adjugate = datum.adjugate
        plus = m + m @ self.reflection.T
        keep = (plus % 2 == 0).all(axis=1)
        twice_c = m @ self.difference.T
        keep &= (twice_c % 2 == 0).all(axis=1)
        c = twice_c // 2
        q = np.einsum("ni,ij,nj->n", c, datum.cartan, c)
        keep &= q <= self.bound_floor
        m, plus, q = m[keep], plus[keep], q[keep]

        # ‖λ−sλ‖² ≤ 4‖ρ‖(‖λ+sλ‖+‖ρ‖), everything scaled by 4·det.
        excess = 4 * datum.determinant * q - 4 * self.rho_scaled
        plus_scaled = np.einsum("ni,ij,nj->n", plus, adjugate, plus)
        keep = (excess <= 0) | (excess**2 <= 16 * self.rho_scaled * plus_scaled)
        m, plus = m[keep], plus[keep]

        # ‖2λ‖² ≤ ‖{λ+sλ}‖²_spin, scaled by det.
        delta = dominate_rows(datum, plus // 2)
        shifted = dominate_rows(datum, delta - 1) + 1
        spin_scaled = np.einsum("ni,ij,nj->n", shifted, adjugate, shifted)
        two_lambda_scaled = np.einsum("ni,ij,nj->n", m, adjugate, m)
        keep = two_lambda_scaled <= spin_scaled
        return m[keep]


def _within_pencil(parameter: Parameter) -> bool:
    query = pencil_min(parameter.datum, parameter.lkt)
    return parameter.datum.norm_sq(parameter.two_lambda) <= query.result_min_norm_sq


def enumerate_candidates(
    datum: RootDatum,
    s: InvolutionRecord,
    bound_b: Fraction | int | None = None,
    max_coordinate: int = DEFAULT_MAX_COORDINATE,
) -> SieveReport:
    """All λ ∈ Λ(s) with ‖λ−sλ‖² ≤ B and ‖2λ‖² ≤ P²_{λ+sλ}.

    Args:
        datum: Root datum of s.
        s: The involution.
        bound_b: Cap on ‖λ−sλ‖²; defaults to 464 for E7 and ‖2ρ‖² otherwise.
        max_coordinate: Hard cap on doubled coordinates. If the proven search
            box exceeds it (always the case when I(s) is non-empty) the box is
            clipped and the report is marked truncated.

    Returns:
        The SieveReport, candidates sorted by doubled λ.
    """
    if s.datum.type_label != datum.type_label:
        raise UsageError(f"Involution of {s.datum.type_label} used with {datum.type_label}")
    bound = default_bound(datum) if bound_b is None else Fraction(bound_b)
    if bound <= 0:
        raise UsageError(f"The sieve bound must be positive, got {bound}")

    plan = SearchPlan(s, bound, max_coordinate)
    if plan.truncated:
        logger.warning(
            "Search box for s rho = %s clipped at %s (box %s)",
            s.s_rho,
            max_coordinate,
            plan.box.tolist(),
        )

    candidates = []
    leaves = 0
    for block in plan.leaves():
        leaves += len(block)
        for row in plan.screen(block):
            lam = Weight(tuple(int(x) for x in row))
            parameter = Parameter(s, lam)
            if _within_pencil(parameter):
                candidates.append(parameter)

    logger.debug(
        "s rho = %s: %s leaves, %s candidates", s.s_rho, leaves, len(candidates)
    )
    return SieveReport(
        s=s,
        candidates=candidates,
        bound_b=bound,
        enumeration_box=tuple(int(x) for x in plan.box),
        truncated=plan.truncated,
        leaves=leaves,
    )


def sieve_admits(
    parameter: Parameter,
    bound_b: Fraction | int | None = None,
    max_coordinate: int = DEFAULT_MAX_COORDINATE,
) -> bool:
    """True iff enumerate_candidates on parameter.s would report parameter.

    Follows the single branch of the search tree leading to 2λ instead of
    enumerating the whole box.
    """
    datum = parameter.datum
    bound = default_bound(datum) if bound_b is None else Fraction(bound_b)
    plan = SearchPlan(parameter.s, bound, max_coordinate)
    return plan.admits(np.array(parameter.lam.doubled)) and _within_pencil(parameter)


def _sieve_worker(
    job: tuple[str, tuple[int, ...], Fraction, int],
) -> tuple[tuple[int, ...], list[tuple[int, ...]], tuple[int, ...], bool, int]:
    type_label, s_rho, bound, max_coordinate = job
    datum = build_root_datum(type_label)
    element = from_regular_image(datum, Weight(s_rho))
    report = enumerate_candidates(
        datum, InvolutionRecord.from_element(element), bound, max_coordinate
    )
    return (
        s_rho,
        [p.lam.doubled for p in report.candidates],
        report.enumeration_box,
        report.truncated,
        report.leaves,
    )


def sieve_all(
    datum: RootDatum,
    involutions: Iterable[InvolutionRecord],
    bound_b: Fraction | int | None = None,
    workers: int = 1,
    max_coordinate: int = DEFAULT_MAX_COORDINATE,
) -> dict[InvolutionRecord, SieveReport]:
    """Run the sieve over every involution with empty I(s).

    Reports come back ordered by sρ whatever the worker count.
    """
    bound = default_bound(datum) if bound_b is None else Fraction(bound_b)
    scattered = sorted(
        (s for s in involutions if s.is_scattered), key=lambda s: s.sort_key
    )
    by_key = {s.s_rho.doubled: s for s in scattered}
    jobs = [(datum.type_label, s.s_rho.doubled, bound, max_coordinate) for s in scattered]
    logger.info(
        "Sieving %s involutions of %s with bound %s on %s worker(s)",
        len(jobs),
        datum.type_label,
        bound,
        workers,
    )

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sieve_worker, jobs, chunksize=8))
    else:
        results = [_sieve_worker(job) for job in jobs]

    reports: dict[InvolutionRecord, SieveReport] = {}
    for done, (s_rho, lambdas, box, truncated, leaves) in enumerate(results, start=1):
        s = by_key[s_rho]
        reports[s] = SieveReport(
            s=s,
            candidates=[Parameter(s, Weight(lam)) for lam in lambdas],
            bound_b=bound,
            enumeration_box=box,
            truncated=truncated,
            leaves=leaves,
        )
        if done % 500 == 0:
            logger.info("Collected %s of %s sieve reports", done, len(results))
    return reports
