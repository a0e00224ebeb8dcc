"""Tests for the saturation smoothness test and the point oracle."""

import numpy as np
import pytest

from ffhyp_core import projective
from ffhyp_core.config import BudgetConfig, BudgetExceededError, SmoothConfig
from ffhyp_core.gf import field_for_order, make_field
from ffhyp_core.linalg import determinant
from ffhyp_core.polyspace import PolyVec, monomial_basis, substitute
from ffhyp_core.textio import parse_poly
from ffhyp_census.smooth import (
    Witness,
    check_witness,
    default_e_max,
    is_smooth,
    is_smooth_points_oracle,
    saturation_degree,
)


@pytest.mark.parametrize(
    "text,q,smooth",
    [
        ("x1^3 + x2^3 + x3^3", 2, True),
        ("x1^3 + x2^3 + x3^3", 3, False),  # a cube in characteristic 3
        ("x1^2 + x2^2 + x3^2", 3, True),
        ("x1^2 + x2^2 + x3^2", 2, False),  # (x1 + x2 + x3)^2
        ("x1*x2 + x3^2", 2, True),
        ("x1*x2", 2, True),
        ("x1^2", 3, False),
        ("x1^2*x2", 2, False),
        ("x1^2*x3 + x2^3 + x2*x3^2", 5, True),
        ("x2^2*x3 + x1^3", 5, False),  # cuspidal cubic
        ("x1^4 + x2^4 + x3^4 + x4^4", 3, True),
    ],
)
def test_saturation_verdicts(text, q, smooth):
    field = make_field(q)
    f = parse_poly(text, field)
    verdict = is_smooth(f)
    assert verdict.smooth is smooth
    assert verdict.method == "saturation"
    if smooth:
        assert f.d <= verdict.saturation_degree <= default_e_max(f.n, f.d)


def test_singular_verdict_carries_genuine_witness():
    f = parse_poly("x2^2*x3 + x1^3", make_field(5))
    verdict = is_smooth(f)
    assert verdict.witness is not None
    assert verdict.witness.extension_degree == 1
    assert check_witness(f, verdict.witness)


def test_witness_search_can_be_disabled():
    f = parse_poly("x1^2*x2", make_field(2))
    verdict = is_smooth(f, SmoothConfig(witness_search=False))
    assert not verdict.smooth
    assert verdict.witness is None


def test_singular_only_over_extension():
    """(x1^2 + x1*x2 + x2^2)^2 has its double roots in F_4, not in F_2."""
    field = make_field(2)
    f = parse_poly("x1^4 + x1^2*x2^2 + x2^4", field)
    verdict = is_smooth(f)
    assert not verdict.smooth
    assert verdict.witness is None

    assert is_smooth_points_oracle(f, 1).smooth
    oracle = is_smooth_points_oracle(f, 2)
    assert not oracle.smooth
    assert oracle.witness.extension_degree == 2
    assert check_witness(f, oracle.witness)


@pytest.mark.parametrize("text,q", [("x1^3 + x2^3 + x3^3", 2), ("x1*x2 + x3^2", 3), ("x1^2*x3 + x2^3 + x2*x3^2", 5)])
def test_points_oracle_agrees_on_smooth_forms(text, q):
    f = parse_poly(text, make_field(q))
    assert is_smooth(f).smooth
    oracle = is_smooth_points_oracle(f, 2)
    assert oracle.smooth and oracle.searched_degree == 2


def test_check_witness_rejects_smooth_points():
    f = parse_poly("x1*x2 + x3^2", make_field(3))
    assert not check_witness(f, Witness(1, (1, 0, 0)))


def test_zero_polynomial_rejected():
    field = make_field(3)
    zero = PolyVec.zero(field, monomial_basis(2, 2))
    with pytest.raises(ValueError):
        is_smooth(zero)
    with pytest.raises(ValueError):
        saturation_degree(zero)
    with pytest.raises(ValueError):
        is_smooth_points_oracle(zero, 1)


def test_points_oracle_budget():
    f = parse_poly("x1^3 + x2^3 + x3^3", make_field(2))
    with pytest.raises(BudgetExceededError):
        is_smooth_points_oracle(f, 3, BudgetConfig(max_points=10))
    with pytest.raises(ValueError):
        is_smooth_points_oracle(f, 0)


def test_low_saturation_cap_reports_singular():
    """A cap below the first full degree cannot certify smoothness."""
    f = parse_poly("x1^3 + x2^3 + x3^3", make_field(2))
    e = saturation_degree(f)
    assert e is not None and e > f.d
    assert saturation_degree(f, e_max=f.d) is None


def test_verdict_to_dict():
    f = parse_poly("x1^2*x2", make_field(2))
    document = is_smooth(f).to_dict()
    assert document["smooth"] is False
    assert document["method"] == "saturation"
    assert document["witness"]["extension_degree"] == 1


# -- agreement with the point oracle and invariance --

NO_WITNESS = SmoothConfig(witness_search=False)


def _random_forms(field, n, d, count, seed):
    basis = monomial_basis(n, d)
    rng = np.random.default_rng(seed)
    forms = []
    while len(forms) < count:
        coeffs = rng.integers(0, field.q, size=basis.size)
        if coeffs.any():
            forms.append(PolyVec(field, basis, coeffs))
    return forms


def _random_invertible(field, size, rng):
    while True:
        m = rng.integers(0, field.q, size=(size, size))
        if determinant(m, field):
            return m


def _agree(f, k_max):
    return is_smooth(f, NO_WITNESS).smooth == is_smooth_points_oracle(f, k_max).smooth


@pytest.mark.slow
def test_every_plane_cubic_mod_2_agrees_with_points():
    field = make_field(2)
    basis = monomial_basis(2, 3)
    rows = projective.vectors_between(2, 0, projective.id_count(2, basis.size), basis.size)
    assert len(rows) == 1023
    disagreements = [r.tolist() for r in rows if not _agree(PolyVec(field, basis, r), 4)]
    assert disagreements == []


@pytest.mark.parametrize("n,d,q,seed", [(2, 3, 2, 3), (2, 4, 3, 5), (3, 3, 2, 7)])
def test_sampled_forms_agree_with_points(n, d, q, seed):
    field = make_field(q)
    for f in _random_forms(field, n, d, 25, seed):
        assert _agree(f, 4), f


@pytest.mark.parametrize("n,d,q", [(2, 3, 3), (1, 4, 5), (2, 2, 4), (3, 2, 2)])
def test_verdict_is_invariant_under_pgl_and_scalars(n, d, q):
    field = field_for_order(q)
    rng = np.random.default_rng(41)
    for f in _random_forms(field, n, d, 20, 43):
        smooth = is_smooth(f, NO_WITNESS).smooth
        a = _random_invertible(field, n + 1, rng)
        c = int(rng.integers(1, field.q))
        assert is_smooth(substitute(f, a), NO_WITNESS).smooth is smooth
        assert is_smooth(f.scale(c), NO_WITNESS).smooth is smooth


def _fermat(field, n, d):
    basis = monomial_basis(n, d)
    f = PolyVec.zero(field, basis)
    for i in range(n + 1):
        exponents = tuple(d if j == i else 0 for j in range(n + 1))
        f = f + PolyVec.monomial(field, basis, exponents)
    return f


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_fermat_is_smooth_iff_p_does_not_divide_d(p, n, d):
    assert is_smooth(_fermat(make_field(p), n, d), NO_WITNESS).smooth is (d % p != 0)


@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_fermat_surfaces(p, d):
    assert is_smooth(_fermat(make_field(p), 3, d), NO_WITNESS).smooth is (d % p != 0)
