"""Projectively fixed forms: P^{A,lam} = {f in P_d : f o A = lam * f}.

Dimensions come from kernels of M_A - lam * I. For diagonal A the dimension is
also a count of exponent tuples, which :func:`diag_fixed_dim` evaluates by
dynamic programming over discrete logarithms as an independent check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from ffhyp_core.gf import GaloisField
from ffhyp_core.group import GroupElem, GroupTable, diagonal
from ffhyp_core.linalg import MatrixFq, batch_rank, kernel, kernel_dim
from ffhyp_core.polyspace import MonomialBasis, PolyVec, substitution_matrix
from ffhyp_core.textio import format_element, format_matrix, format_poly
from ffhyp_census.bounds import lemma6_threshold, thm5_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FixedSpaceRecord:
    """One (A, lam) pair with dim P^{A,lam}.

    Attributes:
        A: The group element.
        lam: Multiplier, a unit of the field.
        d: Degree.
        dim: Dimension of P^{A,lam}.
        basis: Kernel basis as forms, when requested.
    """

    A: GroupElem
    lam: int
    d: int
    dim: int
    basis: list[PolyVec] | None = None

    def to_dict(self) -> dict[str, Any]:
        field = self.A.field
        out: dict[str, Any] = {
            "matrix": format_matrix(self.A.entries, field),
            "lambda": format_element(self.lam, field),
            "n": self.A.n,
            "d": self.d,
            "q": field.q,
            "dim": self.dim,
        }
        if self.basis is not None:
            out["basis"] = [format_poly(f) for f in self.basis]
        return out


def _check_lambda(field: GaloisField, lam: int) -> int:
    lam = field.check(int(lam))
    if lam == 0:
        raise ValueError("lambda must be a unit: f o A = 0 forces f = 0")
    return lam


def fixed_space(A: GroupElem, lam: int, basis: MonomialBasis, want_basis: bool = False) -> FixedSpaceRecord:
    """dim P^{A,lam} as the kernel dimension of M_A - lam * I, with the kernel basis on request.

    Raises:
        ValueError: If lam is zero or sizes do not match.
    """
    field = A.field
    lam = _check_lambda(field, lam)
    if A.n != basis.n:
        raise ValueError(f"matrix acts on {A.n + 1} variables, basis has {basis.nvars}")
    shifted: MatrixFq = substitution_matrix(A, basis).minus_scalar(lam)
    if not want_basis:
        return FixedSpaceRecord(A, lam, basis.d, kernel_dim(shifted))
    dim, vectors = kernel(shifted)
    return FixedSpaceRecord(A, lam, basis.d, dim, [PolyVec(field, basis, v) for v in vectors])


def fixed_dim_table(table: GroupTable) -> np.ndarray:
    """dim P^{A,lam} for every representative A (rows) and unit lam = 1..q-1 (columns)."""
    field = table.field
    eye = np.eye(table.basis.size, dtype=np.int64)
    dims = np.empty((len(table), field.q - 1), dtype=np.int64)
    for lam in range(1, field.q):
        shifted = field.vsub(table.substitution, field.vscale(lam, eye)[None])
        dims[:, lam - 1] = table.basis.size - batch_rank(field, shifted)
        logger.debug("Fixed dimensions for lambda=%d computed over %d elements", lam, len(table))
    return dims


@dataclass(frozen=True)
class FixedDimSummary:
    """Statistics of dim P^{A,lam} over every non-identity class A and every unit lam.

    Pairs (I, lam) with lam != 1 are left out as well; their fixed space is zero.

    Attributes:
        max_dim: Largest dimension, None when the group is trivial.
        max_witness: (table index, lam) of the first pair reaching max_dim.
        tally: Sum of q^dim over the pairs.
        thm5_violations: Pairs (index, lam, dim) above the non-scalar bound, largest first.
        thm5_violation_count: Number of such pairs.
        lemma6_violations: Non-diagonal pairs at or above the diagonal threshold.
        lemma6_violation_count: Number of such pairs.
        diagonal_max: Largest dimension over diagonal non-scalar classes.
        diagonal_witness: (table index, lam) reaching diagonal_max.
    """

    max_dim: int | None
    max_witness: tuple[int, int] | None
    tally: int
    thm5_violations: list[tuple[int, int, int]]
    thm5_violation_count: int
    lemma6_violations: list[tuple[int, int, int]]
    lemma6_violation_count: int
    diagonal_max: int | None
    diagonal_witness: tuple[int, int] | None


def _first_max(dims: np.ndarray, mask: np.ndarray) -> tuple[int | None, tuple[int, int] | None]:
    if not mask.any():
        return None, None
    masked = np.where(mask, dims, -1)
    best = int(masked.max())
    # row-major argmax: smallest index, then smallest lambda
    flat = int(np.argmax(masked == best))
    index, col = divmod(flat, dims.shape[1])
    return best, (index, col + 1)


def _witnesses(dims: np.ndarray, mask: np.ndarray, limit: int) -> tuple[list[tuple[int, int, int]], int]:
    rows, cols = np.nonzero(mask)
    found = sorted(zip(-dims[rows, cols], rows, cols + 1))
    return [(int(i), int(lam), int(-neg)) for neg, i, lam in found[:limit]], len(found)


def summarize_fixed_dims(table: GroupTable, dims: np.ndarray, witness_limit: int = 20) -> FixedDimSummary:
    """Reduce a :func:`fixed_dim_table` to the quantities checked against the bounds."""
    n, d, q = table.basis.n, table.basis.d, table.field.q
    non_scalar = ~table.is_scalar_class()
    pairs = np.repeat(non_scalar[:, None], dims.shape[1], axis=1)
    diag_pairs = pairs & table.is_diagonal()[:, None]

    values, counts = np.unique(dims[pairs], return_counts=True)
    tally = sum(int(c) * q ** int(v) for v, c in zip(values, counts))
    max_dim, max_witness = _first_max(dims, pairs)
    diagonal_max, diagonal_witness = _first_max(dims, diag_pairs)
    thm5, thm5_count = _witnesses(dims, pairs & (dims > thm5_bound(n, d)), witness_limit)
    lemma6, lemma6_count = _witnesses(
        dims, pairs & ~diag_pairs & (dims >= lemma6_threshold(n, d)), witness_limit
    )
    return FixedDimSummary(
        max_dim=max_dim,
        max_witness=max_witness,
        tally=tally,
        thm5_violations=thm5,
        thm5_violation_count=thm5_count,
        lemma6_violations=lemma6,
        lemma6_violation_count=lemma6_count,
        diagonal_max=diagonal_max,
        diagonal_witness=diagonal_witness,
    )


def diag_fixed_dim(field: GaloisField, lambdas: list[int], lam: int, d: int) -> int:
    """Number of tuples j >= 0 with sum j = d and prod lambdas_i^{j_i} = lam.

    Counted with discrete logs: sum j_i * log(lambda_i) = log(lam) mod q - 1,
    by dynamic programming over (variables used, degree used, residue).

    Raises:
        ValueError: If any entry or lam is zero, or d < 0.
    """
    if d < 0:
        raise ValueError(f"degree must be >= 0, got {d}")
    if any(int(x) == 0 for x in lambdas):
        raise ValueError("diagonal entries must be units")
    lam = _check_lambda(field, lam)
    order = field.q - 1
    logs = [field.discrete_log(int(x)) for x in lambdas]
    counts = np.zeros((d + 1, order), dtype=np.int64)
    counts[0, 0] = 1
    for log in logs:
        updated = np.zeros_like(counts)
        for j in range(d + 1):
            updated[j:] += np.roll(counts[: d + 1 - j], (j * log) % order, axis=1)
        counts = updated
    return int(counts[d, field.discrete_log(lam)])


def reflection_probe(field: GaloisField, n: int, d: int) -> list[dict[str, int]]:
    """dim P^{A,lam} for the reflection A = diag(-1, 1, ..., 1) and every unit lam.

    Empty in characteristic 2, where -1 = 1 and A is the identity.
    """
    if field.p == 2:
        return []
    minus_one = field.neg(1)
    entries = [minus_one] + [1] * n
    return [
        {"lambda": lam, "dim": diag_fixed_dim(field, entries, lam, d)}
        for lam in range(1, field.q)
    ]


def reflection(field: GaloisField, n: int) -> GroupElem:
    return diagonal(field, [field.neg(1)] + [1] * n)


__all__ = [
    "FixedDimSummary",
    "FixedSpaceRecord",
    "diag_fixed_dim",
    "fixed_dim_table",
    "fixed_space",
    "reflection",
    "reflection_probe",
    "summarize_fixed_dims",
]
