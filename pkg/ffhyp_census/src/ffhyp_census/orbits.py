"""Orbits of PGL_{n+1}(F_q) on the hypersurfaces of degree d.

Hypersurfaces are canonical coefficient vectors (first nonzero coefficient 1),
numbered in lexicographic order as in :mod:`ffhyp_core.projective`. Every
generator of GL_{n+1}(F_q) permutes these ids; the orbits are the weakly
connected components of the graph with an edge from each id to each of its
generator images.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ffhyp_core import projective
from ffhyp_core.config import BudgetConfig
from ffhyp_core.gf import GaloisField
from ffhyp_core.group import GroupElem, diagonal
from ffhyp_core.polyspace import MonomialBasis, substitution_tensor

logger = logging.getLogger(__name__)

_IMAGE_CHUNK = 2**15


def pgl_generators(field: GaloisField, n: int) -> list[GroupElem]:
    """Transvections I + c E_ij (i != j, c over an F_p-basis of F_q) and diag(g, 1, ..., 1)."""
    gens = []
    for i in range(n + 1):
        for j in range(n + 1):
            if i == j:
                continue
            for t in range(field.k):
                entries = np.eye(n + 1, dtype=np.int64)
                entries[i, j] = field.p**t
                gens.append(GroupElem(field, entries))
    if field.q > 2:
        gens.append(diagonal(field, [field.generator] + [1] * n))
    return gens


def space_size_check(field: GaloisField, basis: MonomialBasis, budgets: BudgetConfig | None = None) -> int:
    """Number of hypersurface ids; raises BudgetExceededError above budgets.max_space_size."""
    (budgets or BudgetConfig()).check(
        f"q^binom(d+n, n) = {field.q}^{basis.size}", field.q**basis.size, "max_space_size"
    )
    return projective.id_count(field.q, basis.size)


def act_on_ids(field: GaloisField, matrices: np.ndarray, keys: np.ndarray, size: int) -> np.ndarray:
    """Ids of f o A for every substitution matrix (G, size, size) and every key; shape (G, len(keys))."""
    vectors = projective.decode(field.q, keys, size)
    images = field.matmul(vectors[None, :, :], np.transpose(matrices, (0, 2, 1)))
    canon, _ = projective.canonicalize(field, images)
    return projective.index_of(field.q, projective.encode(field.q, canon), size)


@dataclass
class OrbitDecomposition:
    """Orbit structure of all hypersurface ids.

    Attributes:
        field: Base field.
        basis: Basis of P_d.
        labels: Orbit label per id position; labels are numbered by representative order.
        representatives: Position of the smallest id of each orbit, ascending.
        sizes: Orbit sizes, aligned with representatives.
    """

    field: GaloisField
    basis: MonomialBasis
    labels: np.ndarray
    representatives: np.ndarray
    sizes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.representatives)

    @property
    def total(self) -> int:
        return len(self.labels)

    def representative_keys(self) -> np.ndarray:
        return projective.key_at(self.field.q, self.representatives, self.basis.size)

    def representative_vectors(self) -> np.ndarray:
        return projective.decode(self.field.q, self.representative_keys(), self.basis.size)

    def orbit_of(self, position: int) -> int:
        return int(self.labels[position])


def orbit_decomposition(
    field: GaloisField,
    basis: MonomialBasis,
    budgets: BudgetConfig | None = None,
    chunk: int = _IMAGE_CHUNK,
) -> OrbitDecomposition:
    """Decompose all hypersurface ids of P_d into PGL orbits.

    Raises:
        BudgetExceededError: If q^binom(d+n, n) exceeds budgets.max_space_size.
    """
    total = space_size_check(field, basis, budgets)
    gens = pgl_generators(field, basis.n)
    matrices = substitution_tensor(field, np.stack([g.entries for g in gens]), basis)
    targets = np.empty((total, len(gens)), dtype=np.int32)
    for lo, keys in projective.iter_chunks(field.q, basis.size, chunk):
        targets[lo : lo + len(keys)] = act_on_ids(field, matrices, keys, basis.size).T
    graph = csr_matrix(
        (np.ones(targets.size, dtype=bool), targets.reshape(-1), np.arange(0, targets.size + 1, len(gens), dtype=np.int64)),
        shape=(total, total),
    )
    _, raw = connected_components(graph, directed=True, connection="weak")
    _, first = np.unique(raw, return_index=True)
    first.sort()
    relabel = np.empty(len(first), dtype=np.int64)
    relabel[raw[first]] = np.arange(len(first))
    labels = relabel[raw]
    sizes = np.bincount(labels, minlength=len(first))
    logger.info(
        "Decomposed %d hypersurfaces of degree %d in P^%d over F_%d into %d orbits",
        total, basis.d, basis.n, field.q, len(first),
    )
    return OrbitDecomposition(field, basis, labels, first.astype(np.int64), sizes.astype(np.int64))


__all__ = [
    "OrbitDecomposition",
    "act_on_ids",
    "orbit_decomposition",
    "pgl_generators",
    "space_size_check",
]
