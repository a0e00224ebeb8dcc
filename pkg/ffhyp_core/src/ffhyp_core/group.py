"""GL_{n+1}(F_q) matrices, canonical PGL representatives and group orders.

A matrix is canonical when its first nonzero entry in row-major order is 1;
each PGL class has exactly one canonical representative. The canonical
invertible matrices are enumerated in row-major lexicographic order of their
entries (element indices), which is also ascending key order in
:mod:`ffhyp_core.projective`.
"""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np
from sympy.combinatorics import Permutation

from ffhyp_core import projective
from ffhyp_core.config import BudgetConfig
from ffhyp_core.gf import GaloisField, parse_prime_power
from ffhyp_core.linalg import MatrixFq, determinant, inverse
from ffhyp_core.polyspace import MonomialBasis, substitution_tensor

logger = logging.getLogger(__name__)

_ENUMERATION_CHUNK = 2**16


@dataclass(frozen=True, eq=False)
class GroupElem:
    """An invertible (n+1)x(n+1) matrix over F_q.

    Attributes:
        field: Field of the entries.
        entries: Integer array of shape (n+1, n+1).
    """

    field: GaloisField
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.int64, copy=True)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 2:
            raise ValueError(f"group elements are square matrices of size >= 2, got shape {entries.shape}")
        if entries.min() < 0 or entries.max() >= self.field.q:
            raise ValueError(f"matrix entries are not elements of F_{self.field.q}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if determinant(entries, self.field) == 0:
            raise ValueError("matrix is not invertible")

    @property
    def n(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def canonical(self) -> bool:
        """True when the first nonzero entry in row-major order is 1."""
        flat = self.entries.reshape(-1)
        return int(flat[np.flatnonzero(flat)[0]]) == 1

    def canonicalize(self) -> "GroupElem":
        return canonicalize(self)

    def is_scalar(self) -> bool:
        diag = np.diag(self.entries)
        return bool(np.all(self.entries[~np.eye(self.n + 1, dtype=bool)] == 0) and np.all(diag == diag[0]))

    def is_diagonal(self) -> bool:
        return bool(np.all(self.entries[~np.eye(self.n + 1, dtype=bool)] == 0))

    def scale(self, c: int) -> "GroupElem":
        return GroupElem(self.field, self.field.vscale(c, self.entries))

    def inverse(self) -> "GroupElem":
        return GroupElem(self.field, inverse(self.entries, self.field))

    def as_matrix(self) -> MatrixFq:
        return MatrixFq(self.field, self.entries)

    def __matmul__(self, other: "GroupElem") -> "GroupElem":
        if self.field != other.field or self.n != other.n:
            raise ValueError("group elements of different fields or sizes")
        return GroupElem(self.field, self.field.matmul(self.entries, other.entries))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupElem) and self.field == other.field and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.field, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"GroupElem(F_{self.field.q}, {self.entries.tolist()})"


def identity(field: GaloisField, n: int) -> GroupElem:
    return GroupElem(field, np.eye(n + 1, dtype=np.int64))


def diagonal(field: GaloisField, entries: list[int]) -> GroupElem:
    return GroupElem(field, np.diag(np.asarray(entries, dtype=np.int64)))


def permutation(field: GaloisField, images: list[int]) -> GroupElem:
    """Matrix with (Ax)_i = x_{images[i]} (0-based), so f o A renames variables."""
    size = len(images)
    entries = np.zeros((size, size), dtype=np.int64)
    entries[np.arange(size), images] = 1
    return GroupElem(field, entries)


def canonicalize(A: GroupElem) -> GroupElem:
    """The canonical representative of A's PGL class (idempotent)."""
    flat, _ = projective.canonicalize(A.field, A.entries.reshape(1, -1))
    return GroupElem(A.field, flat.reshape(A.entries.shape))


def canonicalize_many(field: GaloisField, matrices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Canonicalize a stack of matrices; returns (canonical stack, leading entries)."""
    matrices = np.asarray(matrices, dtype=np.int64)
    flat, lead = projective.canonicalize(field, matrices.reshape(matrices.shape[0], -1))
    return flat.reshape(matrices.shape), lead


@functools.lru_cache(maxsize=8)
def _signed_permutations(size: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    return tuple((perm, Permutation(list(perm)).signature()) for perm in itertools.permutations(range(size)))


def determinants(field: GaloisField, matrices: np.ndarray) -> np.ndarray:
    """Leibniz determinants of a stack of square matrices, vectorised over the stack."""
    matrices = np.asarray(matrices, dtype=np.int64)
    size = matrices.shape[-1]
    total = np.zeros(matrices.shape[:-2], dtype=np.int64)
    rows = np.arange(size)
    for perm, sign in _signed_permutations(size):
        term = matrices[..., 0, perm[0]]
        for i in rows[1:]:
            term = field.vmul(term, matrices[..., i, perm[i]])
        total = field.vadd(total, term) if sign > 0 else field.vsub(total, term)
    return total


def group_order(n: int, q: int | str, which: Literal["GL", "PGL"] = "PGL") -> int:
    """|GL_{n+1}(F_q)| = prod_{i=0}^{n} (q^{n+1} - q^i), or that divided by q - 1.

    Raises:
        ValueError: If q is not a prime power, n < 1 or which is unknown.
    """
    p, k = parse_prime_power(q)
    q = p**k
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    order = 1
    for i in range(n + 1):
        order *= q ** (n + 1) - q**i
    if which == "GL":
        return order
    if which == "PGL":
        return order // (q - 1)
    raise ValueError(f"which must be 'GL' or 'PGL', got {which!r}")


@functools.lru_cache(maxsize=16)
def _pgl_array(field: GaloisField, n: int) -> np.ndarray:
    size = (n + 1) ** 2
    kept = []
    for _, keys in projective.iter_chunks(field.q, size, _ENUMERATION_CHUNK):
        mats = projective.decode(field.q, keys, size).reshape(-1, n + 1, n + 1)
        kept.append(mats[determinants(field, mats) != 0])
    out = np.concatenate(kept, axis=0)
    out.setflags(write=False)
    logger.info("Enumerated %d canonical elements of PGL_%d(F_%d)", len(out), n + 1, field.q)
    return out


def pgl_array(field: GaloisField, n: int, budgets: BudgetConfig | None = None) -> np.ndarray:
    """All canonical PGL_{n+1}(F_q) representatives as an array (P, n+1, n+1), in enumeration order.

    Raises:
        BudgetExceededError: If |PGL_{n+1}(F_q)| exceeds budgets.max_group_size.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    (budgets or BudgetConfig()).check(
        f"|PGL_{n + 1}(F_{field.q})|", group_order(n, field.q, "PGL"), "max_group_size"
    )
    return _pgl_array(field, n)


def enumerate_pgl(
    field: GaloisField,
    n: int,
    budgets: BudgetConfig | None = None,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[GroupElem]:
    """Yield canonical PGL representatives, optionally a contiguous slice of the order."""
    for entries in pgl_array(field, n, budgets)[start:stop]:
        yield GroupElem(field, entries)


class GroupTable:
    """Every canonical PGL representative with its substitution matrix on one basis.

    Built once per (field, n, d) and shared read-only.

    Attributes:
        field: Base field.
        basis: Basis of P_d.
        elements: Array (P, n+1, n+1) of canonical representatives.
        substitution: Array (P, size, size) with substitution[i] = M_{elements[i]}.
        keys: Ascending projective keys of the flattened representatives.
    """

    def __init__(self, field: GaloisField, basis: MonomialBasis, budgets: BudgetConfig | None = None):
        self.field = field
        self.basis = basis
        self.elements = pgl_array(field, basis.n, budgets)
        self.substitution = substitution_tensor(field, self.elements, basis)
        self.substitution.setflags(write=False)
        self.keys = projective.encode(field.q, self.elements.reshape(len(self.elements), -1))
        logger.info(
            "Built group table for PGL_%d(F_%d) on P_%d: %d elements, %d monomials",
            basis.n + 1, field.q, basis.d, len(self.elements), basis.size,
        )

    @property
    def n(self) -> int:
        return self.basis.n

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, index: int) -> GroupElem:
        return GroupElem(self.field, self.elements[index])

    def position(self, matrices: np.ndarray) -> np.ndarray:
        """Enumeration positions of the classes of a stack of invertible matrices."""
        canon, _ = canonicalize_many(self.field, matrices)
        keys = projective.encode(self.field.q, canon.reshape(len(canon), -1))
        pos = np.searchsorted(self.keys, keys)
        if np.any(pos >= len(self.keys)) or np.any(self.keys[np.minimum(pos, len(self.keys) - 1)] != keys):
            raise ValueError("matrix is not invertible or not over this field")
        return pos

    @property
    def identity_index(self) -> int:
        return int(self.position(np.eye(self.n + 1, dtype=np.int64)[None])[0])

    def is_scalar_class(self) -> np.ndarray:
        """Boolean mask of the identity class (the only scalar class)."""
        mask = np.zeros(len(self), dtype=bool)
        mask[self.identity_index] = True
        return mask

    def is_diagonal(self) -> np.ndarray:
        off = ~np.eye(self.n + 1, dtype=bool)
        return ~np.any(self.elements[:, off] != 0, axis=1)


@functools.lru_cache(maxsize=8)
def _group_table(field: GaloisField, basis: MonomialBasis) -> GroupTable:
    return GroupTable(field, basis, BudgetConfig(max_group_size=group_order(basis.n, field.q, "PGL")))


def group_table(field: GaloisField, basis: MonomialBasis, budgets: BudgetConfig | None = None) -> GroupTable:
    """The shared GroupTable for (field, basis), built on first use.

    Raises:
        BudgetExceededError: If |PGL_{n+1}(F_q)| exceeds budgets.max_group_size.
    """
    (budgets or BudgetConfig()).check(
        f"|PGL_{basis.n + 1}(F_{field.q})|", group_order(basis.n, field.q, "PGL"), "max_group_size"
    )
    return _group_table(field, basis)


__all__ = [
    "GroupElem",
    "GroupTable",
    "canonicalize",
    "canonicalize_many",
    "determinants",
    "diagonal",
    "enumerate_pgl",
    "group_order",
    "group_table",
    "identity",
    "permutation",
    "pgl_array",
]
