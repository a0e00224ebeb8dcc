"""Tests for monomial bases, evaluation, derivatives and the substitution action."""

from math import comb

import numpy as np
import pytest

from ffhyp_core.config import BudgetConfig, BudgetExceededError
from ffhyp_core.gf import make_field
from ffhyp_core.group import GroupElem, permutation
from ffhyp_core.linalg import determinant, inverse
from ffhyp_core.polyspace import (
    PolyVec,
    euler_form,
    evaluate,
    evaluate_many,
    monomial_basis,
    partials,
    substitute,
    substitution_matrix,
    substitution_tensor,
)
from ffhyp_core.textio import parse_poly


def random_invertible(field, size, rng):
    while True:
        m = rng.integers(0, field.q, size=(size, size))
        if determinant(m, field):
            return m


@pytest.mark.parametrize("n,d,size", [(2, 3, 10), (3, 3, 20), (2, 4, 15)])
def test_basis_sizes(n, d, size):
    """binom(d+n, n) monomials."""
    assert monomial_basis(n, d).size == size


def test_basis_sizes_grid():
    """Stars and bars for n <= 4, d <= 12."""
    for n in range(1, 5):
        for d in range(1, 13):
            basis = monomial_basis(n, d)
            assert basis.size == comb(d + n, n)
            assert np.all(basis.exponents.sum(axis=1) == d)
            assert len(set(basis.order)) == basis.size


def test_graded_lex_order():
    """x1 > x2 > x3 with the lexicographically largest exponent first."""
    basis = monomial_basis(2, 2)
    assert basis.order == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    assert basis.index((0, 1, 1)) == 4
    assert basis.keys(np.array([[0, 0, 2], [2, 0, 0]])).tolist() == [5, 0]
    with pytest.raises(ValueError):
        basis.index((1, 1, 1))


def test_basis_budget():
    """Oversized bases are refused before allocation."""
    with pytest.raises(BudgetExceededError):
        monomial_basis(4, 12, BudgetConfig(max_basis_size=100))
    with pytest.raises(ValueError):
        monomial_basis(0, 3)


def test_evaluate():
    """Hand-evaluated examples."""
    f3 = make_field(3)
    f = parse_poly("x1*x2+x3^2", f3)
    assert evaluate(f, [1, 2, 1]) == 0
    assert evaluate(f, [0, 0, 0]) == 0
    cube = PolyVec.monomial(f3, monomial_basis(2, 3), (3, 0, 0))
    assert evaluate(cube, [1, 0, 0]) == 1
    with pytest.raises(ValueError):
        evaluate(f, [1, 2])


def test_partials():
    """Characteristic-p derivatives."""
    f2, f3 = make_field(2), make_field(3)
    assert partials(parse_poly("x1^2", f2, n=2))[0].is_zero()

    d1, d2, d3 = partials(parse_poly("x1*x2", make_field(5), n=2))
    assert d1 == parse_poly("x2", make_field(5), n=2)
    assert d2 == parse_poly("x1", make_field(5), n=2)
    assert d3.is_zero()

    assert all(g.is_zero() for g in partials(parse_poly("x1^3+x2^3+x3^3", f3)))


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_euler_relation(p, k):
    """sum_i x_i df/dx_i = d f coefficientwise, d reduced mod p."""
    field = make_field(p, k)
    rng = np.random.default_rng(13)
    for n, d in [(1, 3), (2, 3), (2, 4), (3, 2), (2, 5)]:
        basis = monomial_basis(n, d)
        f = PolyVec(field, basis, rng.integers(0, field.q, size=basis.size))
        assert euler_form(f) == f.scale(field.from_int(d))


def test_substitute_examples():
    """Identity, a coordinate swap and a diagonal scaling."""
    f5 = make_field(5)
    f = parse_poly("x1^2", f5, n=2)
    assert substitute(f, np.eye(3, dtype=np.int64)) == f
    swap = permutation(f5, [1, 0, 2])
    assert substitute(f, swap) == parse_poly("x2^2", f5, n=2)

    g = parse_poly("x1*x2", f5, n=2)
    assert substitute(g, GroupElem(f5, np.diag([2, 3, 1]))) == g


def test_substitution_matrix_shapes():
    """M_I is the identity and permutations act by permuting monomials."""
    field = make_field(3)
    basis = monomial_basis(2, 3)
    ident = substitution_matrix(np.eye(3, dtype=np.int64), basis, field)
    assert np.array_equal(ident.entries, np.eye(basis.size, dtype=np.int64))
    perm = substitution_matrix(permutation(field, [2, 0, 1]), basis).entries
    assert np.all(perm.sum(axis=0) == 1) and np.all(perm.sum(axis=1) == 1)
    assert set(np.unique(perm)) == {0, 1}


@pytest.mark.parametrize("p,k,n,d", [(2, 1, 2, 3), (3, 1, 2, 2), (5, 1, 1, 4), (2, 2, 2, 2), (3, 2, 1, 3), (2, 1, 3, 2)])
def test_action_properties(p, k, n, d):
    """Matrix/functional agreement, M_AB = M_B M_A, inverses and scaling covariance."""
    field = make_field(p, k)
    basis = monomial_basis(n, d)
    rng = np.random.default_rng(17)
    for _ in range(6):
        a = random_invertible(field, n + 1, rng)
        b = random_invertible(field, n + 1, rng)
        f = PolyVec(field, basis, rng.integers(0, field.q, size=basis.size))
        m_a = substitution_matrix(a, basis, field).entries
        m_b = substitution_matrix(b, basis, field).entries
        m_ab = substitution_matrix(field.matmul(a, b), basis, field).entries

        assert np.array_equal(field.matmul(m_a, f.coeffs), substitute(f, GroupElem(field, a)).coeffs)
        assert np.array_equal(m_ab, field.matmul(m_b, m_a))
        assert substitute(substitute(f, a), b) == substitute(f, field.matmul(a, b))
        m_inv = substitution_matrix(inverse(a, field), basis, field).entries
        assert np.array_equal(m_inv, inverse(m_a, field))

        c = int(rng.integers(1, field.q))
        scaled = substitute(f, field.vscale(c, a))
        assert scaled == substitute(f, a).scale(field.pow(c, d))


@pytest.mark.parametrize("p,k,n,d", [(2, 1, 2, 3), (3, 1, 2, 4), (5, 1, 1, 5), (2, 2, 2, 3), (3, 2, 1, 2), (7, 1, 3, 2)])
def test_substitution_agrees_with_evaluation(p, k, n, d):
    """(f o A)(x) = f(Ax) at random points, independently of the substitution matrices."""
    field = make_field(p, k)
    basis = monomial_basis(n, d)
    rng = np.random.default_rng(29)
    for _ in range(8):
        a = random_invertible(field, n + 1, rng)
        f = PolyVec(field, basis, rng.integers(0, field.q, size=basis.size))
        points = rng.integers(0, field.q, size=(40, n + 1))
        moved = field.matmul(points, a.T)
        lhs = evaluate_many(field, basis, substitute(f, a).coeffs, points)
        rhs = evaluate_many(field, basis, f.coeffs, moved)
        assert np.array_equal(lhs, rhs)


def test_substitution_tensor_matches_single_matrices():
    """The batched builder equals the one-at-a-time matrices."""
    field = make_field(2, 2)
    basis = monomial_basis(2, 3)
    rng = np.random.default_rng(1)
    stack = np.stack([random_invertible(field, 3, rng) for _ in range(5)])
    tensor = substitution_tensor(field, stack, basis)
    for a, m in zip(stack, tensor):
        assert np.array_equal(m, substitution_matrix(a, basis, field).entries)


def test_polyvec_validation():
    """Wrong lengths, foreign entries and mismatched arithmetic are rejected."""
    field = make_field(3)
    basis = monomial_basis(2, 2)
    with pytest.raises(ValueError):
        PolyVec(field, basis, [0, 1])
    with pytest.raises(ValueError):
        PolyVec(field, basis, [0, 0, 0, 0, 0, 3])
    with pytest.raises(ValueError):
        PolyVec.zero(field, basis) + PolyVec.zero(field, monomial_basis(2, 3))
    with pytest.raises(ValueError):
        PolyVec.zero(field, basis).canonical()
    f, lead = PolyVec(field, basis, [0, 2, 1, 0, 0, 0]).canonical()
    assert lead == 2 and f.coeffs.tolist() == [0, 1, 2, 0, 0, 0]
