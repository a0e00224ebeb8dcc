"""Dense exact linear algebra over F_q: rank, kernel dimension and kernel basis."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ffhyp_core.gf import GaloisField

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrixFq:
    """A dense row-major matrix of field element indices.

    Attributes:
        field: The field the entries belong to.
        entries: Integer array of shape (rows, cols).
    """

    field: GaloisField
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.ndim != 2:
            raise ValueError(f"matrix entries must be 2-dimensional, got shape {entries.shape}")
        if entries.size and (entries.min() < 0 or entries.max() >= self.field.q):
            raise ValueError(f"matrix entries are not elements of F_{self.field.q}")
        object.__setattr__(self, "entries", entries)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def identity(cls, field: GaloisField, size: int) -> "MatrixFq":
        return cls(field, np.eye(size, dtype=np.int64))

    @classmethod
    def zeros(cls, field: GaloisField, rows: int, cols: int) -> "MatrixFq":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        if self.field != other.field:
            raise ValueError("matrices over different fields")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.entries.shape} @ {other.entries.shape}")
        return MatrixFq(self.field, self.field.matmul(self.entries, other.entries))

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """M @ v for a column vector given as a 1-d array."""
        return self.field.matmul(self.entries, np.asarray(vector, dtype=np.int64))

    def minus_scalar(self, lam: int) -> "MatrixFq":
        """M - lam * I (square matrices)."""
        if self.rows != self.cols:
            raise ValueError("minus_scalar needs a square matrix")
        out = self.entries.copy()
        diag = np.arange(self.rows)
        out[diag, diag] = self.field.vsub(out[diag, diag], np.int64(lam))
        return MatrixFq(self.field, out)


def row_reduce(
    field: GaloisField,
    entries: np.ndarray,
    *,
    reduced: bool = True,
    stop_at: int | None = None,
) -> tuple[np.ndarray, list[int]]:
    """Gaussian elimination with the first nonzero entry of each column as pivot.

    Args:
        field: Field of the entries.
        entries: 2-d array of element indices (not modified).
        reduced: Clear entries above pivots as well (reduced row echelon form).
        stop_at: Stop as soon as this many pivots are found.

    Returns:
        (echelon form, pivot columns); pivot entries are 1.
    """
    a = np.array(entries, dtype=np.int64, copy=True)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows or (stop_at is not None and r >= stop_at):
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        pivot_row = r + int(nz[0])
        if pivot_row != r:
            a[[r, pivot_row]] = a[[pivot_row, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r] = field.vscale(field.inv(lead), a[r])
        column = a[:, c].copy()
        column[r] = 0
        if not reduced:
            column[:r] = 0
        targets = np.flatnonzero(column)
        if targets.size:
            a[targets] = field.vsub(a[targets], field.vmul(column[targets, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return a, pivots


def _entries(m: MatrixFq | np.ndarray, field: GaloisField | None) -> tuple[GaloisField, np.ndarray]:
    if isinstance(m, MatrixFq):
        return m.field, m.entries
    if field is None:
        raise ValueError("a field is required for raw arrays")
    return field, np.asarray(m, dtype=np.int64)


def rank(m: MatrixFq | np.ndarray, field: GaloisField | None = None) -> int:
    """Rank over F_q; elimination stops once full column rank is reached."""
    field, entries = _entries(m, field)
    if entries.size == 0:
        return 0
    _, pivots = row_reduce(field, entries, reduced=False, stop_at=min(entries.shape))
    return len(pivots)


def kernel(m: MatrixFq | np.ndarray, field: GaloisField | None = None) -> tuple[int, np.ndarray]:
    """Right kernel {v : M v = 0}.

    Returns:
        (dimension, basis) where basis has shape (dim, cols); each basis vector
        has a 1 at its free coordinate and zeros at the other free coordinates,
        ordered by free column.
    """
    field, entries = _entries(m, field)
    cols = entries.shape[1]
    if entries.shape[0] == 0:
        return cols, np.eye(cols, dtype=np.int64)
    echelon, pivots = row_reduce(field, entries, reduced=True)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        if pivots:
            basis[i, pivots] = field.vneg(echelon[: len(pivots), f])
    return len(free), basis


def kernel_dim(m: MatrixFq | np.ndarray, field: GaloisField | None = None) -> int:
    """cols - rank."""
    field, entries = _entries(m, field)
    return entries.shape[1] - rank(entries, field)


def determinant(m: MatrixFq | np.ndarray, field: GaloisField | None = None) -> int:
    """Determinant of a square matrix by elimination."""
    field, entries = _entries(m, field)
    n = entries.shape[0]
    if entries.shape != (n, n):
        raise ValueError("determinant needs a square matrix")
    a = entries.copy()
    det = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        pivot_row = c + int(nz[0])
        if pivot_row != c:
            a[[c, pivot_row]] = a[[pivot_row, c]]
            det = field.neg(det)
        lead = int(a[c, c])
        det = field.mul(det, lead)
        a[c] = field.vscale(field.inv(lead), a[c])
        below = np.arange(c + 1, n)
        if below.size:
            a[below] = field.vsub(a[below], field.vmul(a[below, c][:, None], a[c][None, :]))
    return det


def inverse(m: MatrixFq | np.ndarray, field: GaloisField | None = None) -> np.ndarray:
    """Inverse of an invertible square matrix.

    Raises:
        ValueError: If the matrix is singular.
    """
    field, entries = _entries(m, field)
    n = entries.shape[0]
    augmented = np.concatenate([entries, np.eye(n, dtype=np.int64)], axis=1)
    echelon, pivots = row_reduce(field, augmented, reduced=True)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return echelon[:, n:]


def batch_rank(field: GaloisField, stack: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Ranks of a stack of equally shaped matrices, eliminated in lockstep.

    Args:
        field: Field of the entries.
        stack: Array of shape (B, rows, cols).
        chunk: Matrices eliminated together.

    Returns:
        Integer array of B ranks.
    """
    stack = np.asarray(stack, dtype=np.int64)
    if stack.ndim != 3:
        raise ValueError(f"expected a stack of matrices, got shape {stack.shape}")
    ranks = np.zeros(stack.shape[0], dtype=np.int64)
    for lo in range(0, stack.shape[0], chunk):
        ranks[lo : lo + chunk] = _batch_rank(field, stack[lo : lo + chunk].copy())
    return ranks


def _batch_rank(field: GaloisField, a: np.ndarray) -> np.ndarray:
    count, rows, cols = a.shape
    rank_so_far = np.zeros(count, dtype=np.int64)
    row_ids = np.arange(rows)
    for c in range(cols):
        candidates = (a[:, :, c] != 0) & (row_ids[None, :] >= rank_so_far[:, None])
        has_pivot = candidates.any(axis=1)
        if not has_pivot.any():
            continue
        which = np.flatnonzero(has_pivot)
        pivot_row = np.argmax(candidates[which], axis=1)
        target = rank_so_far[which]
        moved = a[which, pivot_row].copy()
        a[which, pivot_row] = a[which, target]
        a[which, target] = field.vmul(moved, field.vinv(moved[:, c])[:, None])
        below = np.where(row_ids[None, :] > target[:, None], a[which, :, c], 0)
        sub = a[which]
        a[which] = field.vsub(sub, field.vmul(below[:, :, None], a[which, target][:, None, :]))
        rank_so_far[which] += 1
    return rank_so_far
