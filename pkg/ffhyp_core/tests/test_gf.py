"""Tests for finite field construction and arithmetic."""

import numpy as np
import pytest

from ffhyp_core.config import BudgetConfig, BudgetExceededError
from ffhyp_core.gf import field_for_order, is_irreducible, make_field, parse_prime_power, smallest_irreducible

# q = 9 with tables disabled exercises the digit-convolution path
NO_TABLES = BudgetConfig(table_field_size=8)


def test_prime_field_basics():
    """F_2 and F_5 have the expected generators and products."""
    f2 = make_field(2)
    assert f2.q == 2 and f2.generator == 1

    f5 = make_field(5)
    assert f5.generator == 2
    assert f5.mul(3, 4) == 2
    assert f5.discrete_log(1) == 0
    assert f5.discrete_log(2) == 1
    assert f5.discrete_log(4) == 2


def test_f4_modulus_and_reduction():
    """F_4 uses x^2 + x + 1 and x * x = x + 1."""
    f4 = make_field(2, 2)
    assert f4.modulus == (1, 1, 1)
    x = f4.from_coeffs([0, 1])
    assert f4.mul(x, x) == f4.from_coeffs([1, 1])
    assert f4.generator == x
    assert f4.order(f4.generator) == 3


def test_f9_modulus():
    """The smallest irreducible quadratic over F_3 is x^2 + 1."""
    assert smallest_irreducible(3, 2) == (1, 0, 1)
    assert is_irreducible((1, 0, 1), 3)
    assert not is_irreducible((2, 0, 1), 3)  # x^2 - 1


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2)])
def test_field_axioms(p, k):
    """Inverses, generator order, Fermat and discrete log laws hold for every element."""
    field = make_field(p, k)
    g = field.generator
    assert field.order(g) == field.q - 1
    for a in range(1, field.q):
        assert field.mul(a, field.inv(a)) == 1
        assert field.pow(a, field.q - 1) == 1
        assert field.pow(g, field.discrete_log(a)) == a
        assert field.pow(a, -1) == field.inv(a)
    for a in range(1, field.q):
        for b in range(1, field.q):
            lhs = field.discrete_log(field.mul(a, b))
            assert lhs == (field.discrete_log(a) + field.discrete_log(b)) % (field.q - 1)


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2), (5, 1), (2, 3)])
def test_frobenius_is_additive(p, k):
    """(a + b)^p = a^p + b^p on random pairs."""
    field = make_field(p, k)
    rng = np.random.default_rng(7)
    for a, b in rng.integers(0, field.q, size=(200, 2)):
        a, b = int(a), int(b)
        assert field.pow(field.add(a, b), p) == field.add(field.pow(a, p), field.pow(b, p))


def test_tableless_field_matches_tables():
    """Arithmetic without log tables agrees with the table-driven field."""
    slow = make_field(3, 2, NO_TABLES)
    fast = make_field(3, 2)
    assert not slow.has_tables and fast.has_tables
    assert slow.generator == fast.generator
    for a in range(1, 9):
        assert slow.discrete_log(a) == fast.discrete_log(a)
        assert slow.inv(a) == fast.inv(a)
        for b in range(9):
            assert slow.mul(a, b) == fast.mul(a, b)


@pytest.mark.parametrize("field", [make_field(2, 3), make_field(3, 2), make_field(3, 2, NO_TABLES), make_field(7)])
def test_vectorised_ops_match_scalar(field):
    """vadd / vsub / vmul / vinv / vpow / vsum agree with the scalar operations."""
    a, b = np.meshgrid(np.arange(field.q), np.arange(field.q), indexing="ij")
    expect_mul = np.array([[field.mul(int(x), int(y)) for y in range(field.q)] for x in range(field.q)])
    expect_add = np.array([[field.add(int(x), int(y)) for y in range(field.q)] for x in range(field.q)])
    expect_sub = np.array([[field.sub(int(x), int(y)) for y in range(field.q)] for x in range(field.q)])
    assert np.array_equal(field.vmul(a, b), expect_mul)
    assert np.array_equal(field.vadd(a, b), expect_add)
    assert np.array_equal(field.vsub(a, b), expect_sub)
    units = field.units()
    assert np.array_equal(field.vinv(units), [field.inv(int(u)) for u in units])
    assert np.array_equal(field.vpow(field.elements(), 5), [field.pow(int(u), 5) for u in field.elements()])
    total = 0
    for u in field.elements():
        total = field.add(total, int(u))
    assert int(field.vsum(field.elements())) == total


def test_matmul_matches_scalar_loops():
    """Matrix products over F_9 equal the schoolbook sum of products."""
    field = make_field(3, 2)
    rng = np.random.default_rng(3)
    a = rng.integers(0, 9, size=(4, 5))
    b = rng.integers(0, 9, size=(5, 3))
    expected = np.zeros((4, 3), dtype=np.int64)
    for i in range(4):
        for j in range(3):
            acc = 0
            for t in range(5):
                acc = field.add(acc, field.mul(int(a[i, t]), int(b[t, j])))
            expected[i, j] = acc
    assert np.array_equal(field.matmul(a, b), expected)


def test_embedding_is_a_homomorphism():
    """F_4 -> F_16 respects addition and multiplication."""
    small, big = make_field(2, 2), make_field(2, 4)
    image = small.embedding_into(big)
    for a in range(4):
        for b in range(4):
            assert image[small.add(a, b)] == big.add(int(image[a]), int(image[b]))
            assert image[small.mul(a, b)] == big.mul(int(image[a]), int(image[b]))
    with pytest.raises(ValueError):
        small.embedding_into(make_field(2, 3))


def test_errors():
    """Bad parameters and zero inversion raise."""
    with pytest.raises(ValueError):
        make_field(4)
    with pytest.raises(ValueError):
        make_field(3, 0)
    with pytest.raises(BudgetExceededError):
        make_field(3, 2, BudgetConfig(max_field_size=8))
    field = make_field(5)
    with pytest.raises(ZeroDivisionError):
        field.inv(0)
    with pytest.raises(ZeroDivisionError):
        field.discrete_log(0)


def test_parse_prime_power():
    """Prime powers parse from ints and 'p^k' strings."""
    assert parse_prime_power(9) == (3, 2)
    assert parse_prime_power("2^3") == (2, 3)
    assert parse_prime_power(7) == (7, 1)
    assert field_for_order(4).k == 2
    for bad in (1, 6, 12, "4^2"):
        with pytest.raises(ValueError):
            parse_prime_power(bad)
