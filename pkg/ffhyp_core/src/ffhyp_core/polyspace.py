"""Homogeneous polynomials of fixed degree as coefficient vectors.

P_d, the degree-d forms in x1..x{n+1}, is indexed by a graded-lex monomial
basis with x1 > x2 > ... > x{n+1}. The substitution action f -> f o A (that is
x -> f(Ax)) is available for single polynomials, as a matrix M_A with
M_A @ coeffs(f) = coeffs(f o A), and as a stacked tensor of such matrices for a
whole batch of group elements at once.
"""

from __future__ import annotations

import functools
import itertools
import logging
from math import comb
from typing import Any

import numpy as np

from ffhyp_core.config import BudgetConfig
from ffhyp_core.gf import GaloisField
from ffhyp_core.linalg import MatrixFq

logger = logging.getLogger(__name__)

_SUBSTITUTION_BATCH = 512


class MonomialBasis:
    """Exponent tuples (j1, ..., j{n+1}) with sum d, in graded-lex order.

    Build with :func:`monomial_basis`; instances are cached and shared.

    Attributes:
        n: Projective dimension (n + 1 variables).
        d: Degree.
        exponents: Integer array of shape (size, n + 1), one row per monomial.
    """

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        rows = [
            np.bincount(np.array(combo, dtype=np.int64), minlength=n + 1)
            for combo in itertools.combinations_with_replacement(range(n + 1), d)
        ]
        self.exponents = np.array(rows, dtype=np.int64).reshape(-1, n + 1)
        self.exponents.setflags(write=False)
        self._index = {tuple(int(v) for v in row): i for i, row in enumerate(self.exponents)}

    @property
    def size(self) -> int:
        return self.exponents.shape[0]

    @property
    def nvars(self) -> int:
        return self.n + 1

    @property
    def order(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.exponents]

    def index(self, exponents: tuple[int, ...]) -> int:
        """Position of a monomial; ValueError if it is not in this basis."""
        try:
            return self._index[tuple(exponents)]
        except KeyError:
            raise ValueError(f"{exponents} is not a degree-{self.d} monomial in {self.nvars} variables") from None

    def keys(self, exponents: np.ndarray) -> np.ndarray:
        """Positions of many exponent rows at once (rows must belong to the basis)."""
        exponents = np.asarray(exponents, dtype=np.int64)
        weights = (self.d + 1) ** np.arange(self.n, -1, -1, dtype=np.int64)
        # graded-lex order within one degree is descending in this encoding
        table = self.exponents @ weights
        return self.size - 1 - np.searchsorted(table[::-1], exponents @ weights)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MonomialBasis) and (self.n, self.d) == (other.n, other.d)

    def __hash__(self) -> int:
        return hash((self.n, self.d))

    def __reduce__(self):
        return (_cached_basis, (self.n, self.d))

    def __repr__(self) -> str:
        return f"MonomialBasis(n={self.n}, d={self.d}, size={self.size})"


@functools.lru_cache(maxsize=256)
def _cached_basis(n: int, d: int) -> MonomialBasis:
    return MonomialBasis(n, d)


def monomial_basis(n: int, d: int, budgets: BudgetConfig | None = None) -> MonomialBasis:
    """The graded-lex basis of P_d in n + 1 variables.

    Args:
        n: Projective dimension, >= 1.
        d: Degree, >= 1.
        budgets: Size guards (defaults when None).

    Raises:
        ValueError: If n < 1 or d < 1.
        BudgetExceededError: If binom(d+n, n) exceeds budgets.max_basis_size.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    (budgets or BudgetConfig()).check(f"monomial basis size binom({d}+{n}, {n})", comb(d + n, n), "max_basis_size")
    return _cached_basis(n, d)


def _basis(n: int, d: int) -> MonomialBasis:
    """Unguarded basis access for internal degrees (d = 0 allowed)."""
    return _cached_basis(n, d)


@functools.lru_cache(maxsize=256)
def product_index(n: int, a: int, b: int) -> np.ndarray:
    """Table T with x^{u_i} * x^{v_j} = x^{w_T[i,j]} for u in degree a, v in degree b."""
    left, right = _basis(n, a).exponents, _basis(n, b).exponents
    sums = left[:, None, :] + right[None, :, :]
    table = _basis(n, a + b).keys(sums.reshape(-1, n + 1)).reshape(len(left), len(right))
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=256)
def _derivative_maps(n: int, d: int) -> tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]:
    """Per variable: (source positions, target positions in degree d-1, exponent multipliers)."""
    exps = _basis(n, d).exponents
    lower = _basis(n, d - 1)
    maps = []
    for i in range(n + 1):
        src = np.flatnonzero(exps[:, i] > 0)
        shifted = exps[src].copy()
        shifted[:, i] -= 1
        maps.append((src, lower.keys(shifted), exps[src, i]))
    return tuple(maps)


@functools.lru_cache(maxsize=256)
def _parents(n: int, e: int) -> tuple[np.ndarray, np.ndarray]:
    """For each degree-e monomial u: (index of u - x_i in degree e-1, i) with i the first variable of u."""
    exps = _basis(n, e).exponents
    var = np.argmax(exps > 0, axis=1)
    parent = exps.copy()
    parent[np.arange(len(exps)), var] -= 1
    return _basis(n, e - 1).keys(parent), var


@functools.lru_cache(maxsize=256)
def _scatter(n: int, e: int) -> np.ndarray:
    """0/1 matrix sending (degree e-1 monomial, variable) pairs to their degree-e product."""
    table = product_index(n, e - 1, 1)
    scatter = np.zeros((table.size, _basis(n, e).size), dtype=np.int64)
    scatter[np.arange(table.size), table.reshape(-1)] = 1
    return scatter


class PolyVec:
    """A homogeneous polynomial as a coefficient vector over a MonomialBasis.

    Attributes:
        field: Coefficient field.
        basis: Monomial basis fixing n, d and the coefficient order.
        coeffs: Integer array of element indices, one per basis monomial.
    """

    __slots__ = ("field", "basis", "coeffs")

    def __init__(self, field: GaloisField, basis: MonomialBasis, coeffs: Any):
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.shape != (basis.size,):
            raise ValueError(f"expected {basis.size} coefficients, got shape {coeffs.shape}")
        if coeffs.size and (coeffs.min() < 0 or coeffs.max() >= field.q):
            raise ValueError(f"coefficients are not elements of F_{field.q}")
        self.field = field
        self.basis = basis
        self.coeffs = coeffs

    @classmethod
    def zero(cls, field: GaloisField, basis: MonomialBasis) -> "PolyVec":
        return cls(field, basis, np.zeros(basis.size, dtype=np.int64))

    @classmethod
    def monomial(cls, field: GaloisField, basis: MonomialBasis, exponents: tuple[int, ...], coeff: int = 1) -> "PolyVec":
        coeffs = np.zeros(basis.size, dtype=np.int64)
        coeffs[basis.index(exponents)] = coeff
        return cls(field, basis, coeffs)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def d(self) -> int:
        return self.basis.d

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def _check_compatible(self, other: "PolyVec") -> None:
        if self.field != other.field or self.basis != other.basis:
            raise ValueError("polynomials over different fields or degrees")

    def __add__(self, other: "PolyVec") -> "PolyVec":
        self._check_compatible(other)
        return PolyVec(self.field, self.basis, self.field.vadd(self.coeffs, other.coeffs))

    def __sub__(self, other: "PolyVec") -> "PolyVec":
        self._check_compatible(other)
        return PolyVec(self.field, self.basis, self.field.vsub(self.coeffs, other.coeffs))

    def scale(self, c: int) -> "PolyVec":
        return PolyVec(self.field, self.basis, self.field.vscale(c, self.coeffs))

    def canonical(self) -> tuple["PolyVec", int]:
        """(scalar multiple with first nonzero coefficient 1, that coefficient)."""
        nz = np.flatnonzero(self.coeffs)
        if nz.size == 0:
            raise ValueError("the zero polynomial has no canonical form")
        lead = int(self.coeffs[nz[0]])
        return self.scale(self.field.inv(lead)), lead

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PolyVec)
            and self.field == other.field
            and self.basis == other.basis
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.field, self.basis, self.coeffs.tobytes()))

    def __repr__(self) -> str:
        return f"PolyVec(F_{self.field.q}, n={self.n}, d={self.d}, coeffs={self.coeffs.tolist()})"


def evaluate_many(field: GaloisField, basis: MonomialBasis, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate one or several forms at many points.

    Args:
        field: Field of both coefficients and point coordinates.
        basis: Basis of the forms.
        coeffs: Shape (size,) for one form or (size, g) for g forms.
        points: Shape (N, n + 1).

    Returns:
        Values of shape (N,) or (N, g).
    """
    points = np.asarray(points, dtype=np.int64)
    if points.ndim != 2 or points.shape[1] != basis.nvars:
        raise ValueError(f"points must have shape (N, {basis.nvars}), got {points.shape}")
    monomials = np.ones((points.shape[0], basis.size), dtype=np.int64)
    for i in range(basis.nvars):
        powers = np.stack([field.vpow(points[:, i], e) for e in range(basis.d + 1)], axis=1)
        monomials = field.vmul(monomials, powers[:, basis.exponents[:, i]])
    return field.matmul(monomials, np.asarray(coeffs, dtype=np.int64))


def evaluate(f: PolyVec, point: Any) -> int:
    """f(point) for a point given as n + 1 element indices of f's field."""
    point = np.asarray(point, dtype=np.int64)
    if point.shape != (f.basis.nvars,):
        raise ValueError(f"point must have {f.basis.nvars} coordinates, got shape {point.shape}")
    if point.min() < 0 or point.max() >= f.field.q:
        raise ValueError(f"point coordinates are not elements of F_{f.field.q}")
    return int(evaluate_many(f.field, f.basis, f.coeffs, point[None, :])[0])


def partials(f: PolyVec) -> list[PolyVec]:
    """Formal partial derivatives d f / d x_i, i = 1..n+1, as degree d-1 forms.

    The coefficient j_i * f_j is reduced in characteristic p, so multiples of p
    vanish.
    """
    lower = _basis(f.n, f.d - 1)
    out = []
    for src, dst, mult in _derivative_maps(f.n, f.d):
        coeffs = np.zeros(lower.size, dtype=np.int64)
        coeffs[dst] = f.field.vmul(f.coeffs[src], mult % f.field.p)
        out.append(PolyVec(f.field, lower, coeffs))
    return out


def multiply_by_variable(g: PolyVec, i: int) -> PolyVec:
    """x_{i+1} * g as a form of degree deg(g) + 1 (i is 0-based)."""
    upper = _basis(g.n, g.d + 1)
    coeffs = np.zeros(upper.size, dtype=np.int64)
    coeffs[product_index(g.n, g.d, 1)[:, i]] = g.coeffs
    return PolyVec(g.field, upper, coeffs)


def euler_form(f: PolyVec) -> PolyVec:
    """sum_i x_i * d f / d x_i, which equals d * f in any characteristic."""
    total = PolyVec.zero(f.field, f.basis)
    for i, part in enumerate(partials(f)):
        total = total + multiply_by_variable(part, i)
    return total


def _matrix_entries(field: GaloisField, A: Any, nvars: int) -> np.ndarray:
    other = getattr(A, "field", None)
    if other is not None and other != field:
        raise ValueError(f"matrix over F_{other.q} applied to a form over F_{field.q}")
    entries = np.asarray(getattr(A, "entries", A), dtype=np.int64)
    if entries.shape != (nvars, nvars):
        raise ValueError(f"expected a {nvars}x{nvars} matrix, got shape {entries.shape}")
    return entries


def substitution_tensor(field: GaloisField, matrices: np.ndarray, basis: MonomialBasis) -> np.ndarray:
    """Substitution matrices M_A for a stack of matrices A.

    Monomial images are built degree by degree: the image of x^u is the image of
    x^{u - e_i} times the linear form (Ax)_i, for i the first variable of u.

    Args:
        field: Field of the entries.
        matrices: Shape (P, n + 1, n + 1).
        basis: Target basis of P_d.

    Returns:
        Shape (P, size, size); column j of each slice is coeffs(x^{u_j} o A).
    """
    matrices = np.asarray(matrices, dtype=np.int64)
    n = basis.n
    if matrices.ndim != 3 or matrices.shape[1:] != (n + 1, n + 1):
        raise ValueError(f"expected matrices of shape (P, {n + 1}, {n + 1}), got {matrices.shape}")
    out = np.empty((matrices.shape[0], basis.size, basis.size), dtype=np.int64)
    for lo in range(0, matrices.shape[0], _SUBSTITUTION_BATCH):
        batch = matrices[lo : lo + _SUBSTITUTION_BATCH]
        images = np.ones((batch.shape[0], 1, 1), dtype=np.int64)
        for e in range(1, basis.d + 1):
            parent, var = _parents(n, e)
            previous = images[:, parent, :]
            linear = batch[:, var, :]
            terms = field.vmul(previous[..., :, None], linear[..., None, :])
            images = field.matmul(terms.reshape(batch.shape[0], len(parent), -1), _scatter(n, e))
        out[lo : lo + batch.shape[0]] = images.transpose(0, 2, 1)
    return out


def substitution_matrix(A: Any, basis: MonomialBasis, field: GaloisField | None = None) -> MatrixFq:
    """M_A with M_A @ coeffs(f) = coeffs(f o A); M_{AB} = M_B @ M_A.

    Args:
        A: A GroupElem, MatrixFq or raw (n+1)x(n+1) array (then field is required).
        basis: Basis of P_d.
        field: Field when A carries none.
    """
    field = field or getattr(A, "field", None)
    if field is None:
        raise ValueError("a field is required for raw matrices")
    entries = _matrix_entries(field, A, basis.nvars)
    return MatrixFq(field, substitution_tensor(field, entries[None], basis)[0])


def substitute(f: PolyVec, A: Any) -> PolyVec:
    """f o A, the form x -> f(Ax)."""
    entries = _matrix_entries(f.field, A, f.basis.nvars)
    matrix = substitution_tensor(f.field, entries[None], f.basis)[0]
    return PolyVec(f.field, f.basis, f.field.matmul(matrix, f.coeffs))


__all__ = [
    "MonomialBasis",
    "PolyVec",
    "euler_form",
    "evaluate",
    "evaluate_many",
    "monomial_basis",
    "multiply_by_variable",
    "partials",
    "product_index",
    "substitute",
    "substitution_matrix",
    "substitution_tensor",
]
