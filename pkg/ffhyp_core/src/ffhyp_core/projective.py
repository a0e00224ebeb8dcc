"""Canonical representatives of scalar classes of vectors over F_q.

A nonzero vector is canonical when its first nonzero entry is 1. Canonical
vectors of a fixed length are keyed by reading them as base-q integers (most
significant entry first), so key order is lexicographic order. The canonical
vectors of length m, listed in key order, are numbered 0..(q^m-1)/(q-1)-1 and
this module converts between that numbering, keys and vectors in closed form,
without materialising the whole list.
"""

from __future__ import annotations

import numpy as np

from ffhyp_core.gf import GaloisField


def canonicalize(field: GaloisField, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each row so its first nonzero entry is 1.

    Args:
        field: Field of the entries.
        rows: Array of shape (..., length).

    Returns:
        (canonical rows, leading entries); all-zero rows stay zero with lead 0.
    """
    rows = np.asarray(rows, dtype=np.int64)
    nonzero = rows != 0
    first = np.argmax(nonzero, axis=-1)
    lead = np.take_along_axis(rows, first[..., None], axis=-1)[..., 0]
    safe = np.where(lead == 0, 1, lead)
    scale = field.vinv(safe)
    return field.vmul(rows, scale[..., None]), lead


def id_count(q: int, length: int) -> int:
    """Number of canonical vectors of the given length: (q^length - 1)/(q - 1)."""
    return (q**length - 1) // (q - 1)


def encode(q: int, rows: np.ndarray) -> np.ndarray:
    """Base-q keys of rows (most significant entry first), int64."""
    rows = np.asarray(rows, dtype=np.int64)
    keys = np.zeros(rows.shape[:-1], dtype=np.int64)
    for j in range(rows.shape[-1]):
        keys = keys * q + rows[..., j]
    return keys


def decode(q: int, keys: np.ndarray, length: int) -> np.ndarray:
    """Inverse of :func:`encode` for vectors of the given length."""
    keys = np.asarray(keys, dtype=np.int64)
    weights = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (keys[..., None] // weights) % q


def _powers(q: int, length: int) -> np.ndarray:
    return q ** np.arange(length + 1, dtype=np.int64)


def index_of(q: int, keys: np.ndarray, length: int) -> np.ndarray:
    """Position of canonical keys in lexicographic order of all canonical vectors."""
    keys = np.asarray(keys, dtype=np.int64)
    powers = _powers(q, length)
    t = np.searchsorted(powers, keys, side="right") - 1
    top = powers[t]
    return (top - 1) // (q - 1) + (keys - top)


def key_at(q: int, index: np.ndarray, length: int) -> np.ndarray:
    """Key of the canonical vector at the given position(s)."""
    index = np.asarray(index, dtype=np.int64)
    powers = _powers(q, length)
    offsets = (powers - 1) // (q - 1)
    t = np.searchsorted(offsets, index, side="right") - 1
    return powers[t] + (index - offsets[t])


def vectors_between(q: int, start: int, stop: int, length: int) -> np.ndarray:
    """Canonical vectors with positions in [start, stop), in order."""
    return decode(q, key_at(q, np.arange(start, stop, dtype=np.int64), length), length)


def iter_chunks(q: int, length: int, chunk: int, start: int = 0, stop: int | None = None):
    """Yield (start, keys) for consecutive chunks of canonical vectors."""
    stop = id_count(q, length) if stop is None else stop
    for lo in range(start, stop, chunk):
        hi = min(lo + chunk, stop)
        yield lo, key_at(q, np.arange(lo, hi, dtype=np.int64), length)


def all_vectors(q: int, length: int) -> np.ndarray:
    """Every vector of F_q^length (zero included) in lexicographic order."""
    return decode(q, np.arange(q**length, dtype=np.int64), length)
