"""Tests for projectively fixed forms and their dimension table."""

import numpy as np
import pytest

from ffhyp_core.gf import field_for_order, make_field
from ffhyp_core.group import GroupElem, diagonal, group_table, identity, permutation
from ffhyp_core.linalg import determinant
from ffhyp_core.polyspace import monomial_basis, substitute
from ffhyp_census.bounds import lemma6_threshold, thm5_bound
from ffhyp_census.fixedspace import (
    diag_fixed_dim,
    fixed_dim_table,
    fixed_space,
    reflection,
    reflection_probe,
    summarize_fixed_dims,
)


def test_swap_eigenspaces():
    """Swapping x1 and x2 splits the quadrics of P^2 into 4 symmetric and 2 antisymmetric forms."""
    field = make_field(3)
    swap = permutation(field, [1, 0, 2])
    basis = monomial_basis(2, 2)
    assert fixed_space(swap, 1, basis).dim == 4
    assert fixed_space(swap, 2, basis).dim == 2


def test_swap_exceeds_non_scalar_bound_for_small_degree():
    field = make_field(2)
    swap = permutation(field, [1, 0, 2])
    record = fixed_space(swap, 1, monomial_basis(2, 3))
    assert record.dim == 6
    assert record.dim > thm5_bound(2, 3)


def test_basis_vectors_are_fixed():
    field = make_field(5)
    A = GroupElem(field, np.array([[1, 1, 0], [0, 1, 0], [0, 0, 2]]))
    basis = monomial_basis(2, 3)
    for lam in range(1, 5):
        record = fixed_space(A, lam, basis, want_basis=True)
        assert len(record.basis) == record.dim
        for f in record.basis:
            assert substitute(f, A) == f.scale(lam)


def test_identity_fixes_everything_with_lambda_one():
    field = make_field(3)
    basis = monomial_basis(2, 3)
    assert fixed_space(identity(field, 2), 1, basis).dim == basis.size
    assert fixed_space(identity(field, 2), 2, basis).dim == 0


def test_lambda_must_be_a_unit():
    field = make_field(3)
    with pytest.raises(ValueError):
        fixed_space(identity(field, 2), 0, monomial_basis(2, 2))
    with pytest.raises(ValueError):
        fixed_space(identity(field, 1), 1, monomial_basis(2, 2))


@pytest.mark.parametrize("entries", [[1, 2, 3], [2, 2, 1], [4, 1, 1], [3, 2, 4]])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_diagonal_count_matches_kernel(entries, d):
    field = make_field(5)
    A = diagonal(field, entries)
    basis = monomial_basis(2, d)
    dims = [diag_fixed_dim(field, entries, lam, d) for lam in range(1, 5)]
    assert dims == [fixed_space(A, lam, basis).dim for lam in range(1, 5)]
    assert sum(dims) == basis.size


def test_diagonal_count_over_extension_field():
    field = make_field(2, 2)
    entries = [field.generator, 1]
    A = diagonal(field, entries)
    basis = monomial_basis(1, 5)
    for lam in range(1, 4):
        assert diag_fixed_dim(field, entries, lam, 5) == fixed_space(A, lam, basis).dim


def test_diagonal_count_rejects_zero_entries():
    field = make_field(5)
    with pytest.raises(ValueError):
        diag_fixed_dim(field, [0, 1, 1], 1, 2)
    with pytest.raises(ValueError):
        diag_fixed_dim(field, [1, 1, 1], 1, -1)


def test_reflection_probe():
    assert reflection_probe(make_field(2), 2, 4) == []
    field = make_field(3)
    probe = reflection_probe(field, 2, 4)
    assert [row["lambda"] for row in probe] == [1, 2]
    # even powers of x1 are fixed, odd powers change sign
    assert [row["dim"] for row in probe] == [9, 6]
    assert probe[0]["dim"] == fixed_space(reflection(field, 2), 1, monomial_basis(2, 4)).dim


def test_dimension_table_matches_single_kernels():
    field = make_field(3)
    basis = monomial_basis(1, 3)
    table = group_table(field, basis)
    dims = fixed_dim_table(table)
    assert dims.shape == (len(table), 2)
    for i in range(0, len(table), 5):
        for lam in (1, 2):
            assert dims[i, lam - 1] == fixed_space(table.element(i), lam, basis).dim
    assert dims[table.identity_index].tolist() == [basis.size, 0]
    assert np.all(dims.sum(axis=1) <= basis.size)


def test_summary_over_plane_cubics_mod_2():
    field = make_field(2)
    basis = monomial_basis(2, 3)
    table = group_table(field, basis)
    dims = fixed_dim_table(table)
    summary = summarize_fixed_dims(table, dims)

    others = np.ones(len(table), dtype=bool)
    others[table.identity_index] = False
    assert summary.tally == sum(2 ** int(v) for v in dims[others, 0])
    assert summary.max_dim == int(dims[others].max())
    assert summary.max_dim >= 6

    index, lam = summary.max_witness
    assert index != table.identity_index
    assert fixed_space(table.element(index), lam, basis).dim == summary.max_dim

    assert summary.thm5_violation_count >= 1
    for index, lam, dim in summary.thm5_violations:
        assert dim > thm5_bound(2, 3)
        assert fixed_space(table.element(index), lam, basis).dim == dim
    assert [v[2] for v in summary.thm5_violations] == sorted((v[2] for v in summary.thm5_violations), reverse=True)

    for index, lam, dim in summary.lemma6_violations:
        assert not table.element(index).is_diagonal()
        assert dim >= lemma6_threshold(2, 3)

    # over F_2 the only diagonal class is the identity
    assert summary.diagonal_max is None
    assert summary.diagonal_witness is None


def test_record_to_dict():
    field = make_field(3)
    record = fixed_space(permutation(field, [1, 0, 2]), 2, monomial_basis(2, 2), want_basis=True)
    document = record.to_dict()
    assert document["dim"] == 2
    assert document["matrix"] == "0,1,0;1,0,0;0,0,1"
    assert document["lambda"] == "2"
    assert len(document["basis"]) == 2


def _random_units(field, count, rng):
    return [int(x) for x in rng.integers(1, field.q, size=count)]


def test_diagonal_count_matches_kernel_on_random_diagonals():
    rng = np.random.default_rng(2024)
    cases = 0
    for q in (2, 3, 4, 5, 7, 9):
        field = field_for_order(q)
        for n in (1, 2, 3):
            for d in range(1, 9):
                basis = monomial_basis(n, d)
                for _ in range(2):
                    entries = _random_units(field, n + 1, rng)
                    A = diagonal(field, entries)
                    dims = []
                    for lam in range(1, field.q):
                        dim = diag_fixed_dim(field, entries, lam, d)
                        assert dim == fixed_space(A, lam, basis).dim, (q, n, d, entries, lam)
                        dims.append(dim)
                        cases += 1
                    assert sum(dims) == basis.size
    assert cases >= 1000


def test_scaling_the_matrix_rescales_the_multiplier():
    """P^{cA, c^d lam} = P^{A, lam}."""
    rng = np.random.default_rng(77)
    cases = 0
    for q in (2, 3, 4, 5, 7):
        field = field_for_order(q)
        for n in (1, 2):
            for d in (2, 3, 4):
                basis = monomial_basis(n, d)
                for _ in range(20):
                    while True:
                        entries = rng.integers(0, field.q, size=(n + 1, n + 1))
                        if determinant(entries, field):
                            break
                    A = GroupElem(field, entries)
                    c = int(rng.integers(1, field.q))
                    lam = int(rng.integers(1, field.q))
                    cA = GroupElem(field, field.vscale(c, entries))
                    scaled_lam = field.mul(field.pow(c, d), lam)
                    record = fixed_space(A, lam, basis, want_basis=True)
                    assert fixed_space(cA, scaled_lam, basis).dim == record.dim
                    for g in record.basis:
                        assert substitute(g, cA) == g.scale(scaled_lam)
                    cases += 1
    assert cases >= 500
