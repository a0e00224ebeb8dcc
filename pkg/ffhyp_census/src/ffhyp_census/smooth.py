"""Smoothness of projective hypersurfaces V(f) over the algebraic closure.

The authoritative test is a saturation check: V(f, df/dx_1, ..., df/dx_{n+1})
is empty exactly when, for some degree e, the degree-e multiples of these forms
span all of P_e. A point search over P^n(F_{q^k}) serves as an independent,
one-sided oracle: a common zero proves singularity, finding none proves
nothing on its own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb
from typing import Any

import numpy as np

from ffhyp_core import projective
from ffhyp_core.config import BudgetConfig, SmoothConfig
from ffhyp_core.gf import make_field
from ffhyp_core.linalg import row_reduce
from ffhyp_core.polyspace import PolyVec, evaluate_many, partials, product_index

logger = logging.getLogger(__name__)

_POINT_CHUNK = 2**14


@dataclass(frozen=True)
class Witness:
    """A common zero of f and its partials.

    Attributes:
        extension_degree: r such that the point lies in P^n(F_{q^r}).
        coordinates: Canonical projective coordinates as element indices of F_{q^r}.
    """

    extension_degree: int
    coordinates: tuple[int, ...]


@dataclass(frozen=True)
class SmoothnessVerdict:
    """Outcome of a smoothness test.

    Attributes:
        smooth: For method "saturation", smoothness over the closure. For
            method "points", True only means no singular point was found.
        method: "saturation" or "points".
        witness: A singular point when one was found.
        saturation_degree: Degree e at which the Macaulay matrix became full.
        searched_degree: Largest extension degree searched by the point oracle.
    """

    smooth: bool
    method: str
    witness: Witness | None = None
    saturation_degree: int | None = None
    searched_degree: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "smooth": self.smooth,
            "method": self.method,
            "saturation_degree": self.saturation_degree,
            "searched_degree": self.searched_degree,
            "witness": None
            if self.witness is None
            else {"extension_degree": self.witness.extension_degree, "coordinates": list(self.witness.coordinates)},
        }


def default_e_max(n: int, d: int) -> int:
    """(n+2)(d-1) + 1."""
    return (n + 2) * (d - 1) + 1


def _generators(f: PolyVec) -> list[PolyVec]:
    return [f] + [g for g in partials(f) if not g.is_zero()]


def _macaulay_rows(g: PolyVec, e: int) -> np.ndarray:
    """Rows m * g for every monomial m of degree e - deg(g), in the degree-e basis."""
    table = product_index(g.n, e - g.d, g.d)
    rows = np.zeros((table.shape[0], comb(e + g.n, g.n)), dtype=np.int64)
    rows[np.arange(table.shape[0])[:, None], table] = g.coeffs[None, :]
    return rows


def saturation_degree(f: PolyVec, e_max: int | None = None) -> int | None:
    """First degree e in [d, e_max] where the Macaulay matrix has full rank, else None."""
    if f.is_zero():
        raise ValueError("the zero polynomial defines no hypersurface")
    e_max = default_e_max(f.n, f.d) if e_max is None else e_max
    gens = _generators(f)
    if len(gens) == 1:
        # every partial vanishes identically, so V(f) is its own singular locus
        return None
    for e in range(f.d, e_max + 1):
        width = comb(e + f.n, f.n)
        matrix = np.concatenate([_macaulay_rows(g, e) for g in gens], axis=0)
        if matrix.shape[0] < width:
            continue
        _, pivots = row_reduce(f.field, matrix, reduced=False, stop_at=width)
        if len(pivots) == width:
            return e
    return None


def _point_count(q: int, n: int) -> int:
    return projective.id_count(q, n + 1)


def _search_points(f: PolyVec, r: int, budgets: BudgetConfig) -> Witness | None:
    """First canonical point of P^n(F_{q^r}) where f and all partials vanish."""
    base = f.field
    big = make_field(base.p, base.k * r, budgets)
    embed = base.embedding_into(big)
    coeffs = embed[f.coeffs][:, None]
    derivs = partials(f)
    parts = np.stack([embed[g.coeffs] for g in derivs], axis=1)
    lower = derivs[0].basis
    for _, keys in projective.iter_chunks(big.q, f.n + 1, _POINT_CHUNK):
        points = projective.decode(big.q, keys, f.n + 1)
        zero = ~evaluate_many(big, f.basis, coeffs, points).any(axis=1)
        if not zero.any():
            continue
        zero &= ~evaluate_many(big, lower, parts, points).any(axis=1)
        hits = np.flatnonzero(zero)
        if hits.size:
            return Witness(r, tuple(int(c) for c in points[hits[0]]))
    return None


def is_smooth_points_oracle(f: PolyVec, k_max: int, budgets: BudgetConfig | None = None) -> SmoothnessVerdict:
    """Search P^n(F_{q^r}), r = 1..k_max, for a singular point.

    Raises:
        ValueError: If f is zero or k_max < 1.
        BudgetExceededError: If the total number of points exceeds budgets.max_points.
    """
    budgets = budgets or BudgetConfig()
    if f.is_zero():
        raise ValueError("the zero polynomial defines no hypersurface")
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    total = sum(_point_count(f.field.q**r, f.n) for r in range(1, k_max + 1))
    budgets.check(f"points of P^{f.n} over F_{f.field.q}^1..{k_max}", total, "max_points")
    for r in range(1, k_max + 1):
        witness = _search_points(f, r, budgets)
        if witness is not None:
            return SmoothnessVerdict(False, "points", witness=witness, searched_degree=r)
    return SmoothnessVerdict(True, "points", searched_degree=k_max)


def is_smooth(
    f: PolyVec,
    config: SmoothConfig | None = None,
    budgets: BudgetConfig | None = None,
) -> SmoothnessVerdict:
    """Saturation verdict, with a rational witness attached to singular verdicts when cheap.

    Raises:
        ValueError: If f is the zero polynomial.
    """
    config = config or SmoothConfig()
    budgets = budgets or BudgetConfig()
    e = saturation_degree(f, config.e_max)
    if e is not None:
        return SmoothnessVerdict(True, "saturation", saturation_degree=e)
    witness = None
    if config.witness_search and _point_count(f.field.q, f.n) <= budgets.max_points:
        witness = _search_points(f, 1, budgets)
    logger.debug("Singular: %s (witness %s)", f, witness)
    return SmoothnessVerdict(False, "saturation", witness=witness)


def check_witness(f: PolyVec, witness: Witness, budgets: BudgetConfig | None = None) -> bool:
    """True when f and every partial vanish at the witness."""
    big = make_field(f.field.p, f.field.k * witness.extension_degree, budgets)
    embed = f.field.embedding_into(big)
    point = np.asarray(witness.coordinates, dtype=np.int64)[None, :]
    if evaluate_many(big, f.basis, embed[f.coeffs], point).any():
        return False
    return all(not evaluate_many(big, g.basis, embed[g.coeffs], point).any() for g in partials(f))


__all__ = [
    "SmoothnessVerdict",
    "Witness",
    "check_witness",
    "default_e_max",
    "is_smooth",
    "is_smooth_points_oracle",
    "saturation_degree",
]
