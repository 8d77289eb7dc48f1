"""Spin norm, Vogan pencils and the Dirac inequality equality test."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from spinsieve.common.exceptions import UsageError
from spinsieve.common.rootsystem import RootDatum, Weight
from spinsieve.common.weyl import make_dominant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PencilQuery:
    """Minimum of the spin norm along the pencil {δ + nβ : n ≥ 0}.

    ``achieved_at_n`` is the smallest n attaining the minimum, ``stopped_at_n``
    the n at which the scan could stop.
    """

    delta: Weight
    result_min_norm_sq: Fraction
    achieved_at_n: int
    stopped_at_n: int


def _check_k_type(datum: RootDatum, mu: Weight) -> None:
    datum.check(mu)
    if not (mu.is_dominant and mu.is_integral):
        raise UsageError(f"A K-type must be dominant and integral, got {mu}")


def spin_norm_sq(datum: RootDatum, mu: Weight) -> Fraction:
    """‖{μ−ρ}+ρ‖² for a K-type μ.

    Raises:
        UsageError: If μ is not dominant and integral.
    """
    _check_k_type(datum, mu)
    shifted, _ = make_dominant(datum, mu - datum.rho)
    return datum.norm_sq(shifted + datum.rho)


@lru_cache(maxsize=65536)
def _pencil_min(datum: RootDatum, delta: Weight) -> PencilQuery:
    beta = datum.highest_root
    rho_norm_sq = datum.norm_sq(datum.rho)

    best: Fraction | None = None
    best_n = 0
    n = 0
    current = delta
    while True:
        value = spin_norm_sq(datum, current)
        if best is None or value < best:
            best, best_n = value, n

        # spin(x) ≥ ‖x−ρ‖² + ‖ρ‖² because {x−ρ} is dominant. The quadratic
        # q(n) = ‖δ+nβ−ρ‖² is non-decreasing from n on once q(n+1) ≥ q(n).
        following = current + beta
        gap = datum.norm_sq(current - datum.rho)
        if datum.norm_sq(following - datum.rho) >= gap and gap + rho_norm_sq > best:
            break
        current = following
        n += 1

    logger.debug("Pencil of %s: min %s at n=%s, stopped at n=%s", delta, best, best_n, n)
    return PencilQuery(delta, best, best_n, n)


def pencil_min(datum: RootDatum, delta: Weight) -> PencilQuery:
    """Exact minimum spin norm (squared) over the pencil starting at δ.

    Raises:
        UsageError: If δ is not dominant and integral.
    """
    _check_k_type(datum, delta)
    return _pencil_min(datum, delta)


def dirac_attained(datum: RootDatum, mu: Weight, two_lambda: Weight) -> bool:
    """True iff ‖μ‖_spin = ‖2λ‖, the equality case of the Dirac inequality."""
    return spin_norm_sq(datum, mu) == datum.norm_sq(two_lambda)
