"""Tests for stabilizers, the census engine and its three modes."""

from fractions import Fraction

import numpy as np
import pytest

from ffhyp_core.config import BudgetConfig, BudgetExceededError, FfhypConfig
from ffhyp_core.gf import make_field
from ffhyp_core.group import diagonal, group_order, permutation
from ffhyp_core.polyspace import substitute
from ffhyp_core.textio import parse_poly
from ffhyp_census.bounds import zeta_density
from ffhyp_census.checkpoint import CheckpointMismatchError
from ffhyp_census.census import (
    CensusEngine,
    GroupPartial,
    OrbitPartial,
    census_exhaustive,
    census_group_side,
    census_sample,
    contiguous_ranges,
    hypersurface_id,
    prefix_length,
    stabilizer,
    trend,
    wilson_interval,
)
from ffhyp_census.report import CSV_COLUMNS, to_json


# -- stabilizers --


def test_conic_stabilizer_is_pgl2():
    field = make_field(3)
    f = parse_poly("x1*x2 + x3^2", field)
    result = stabilizer(f)
    assert result.order == group_order(1, 3, "PGL")
    for A, lam in result.elements:
        assert A.canonical
        assert substitute(f, A) == f.scale(lam)
    assert result.contains(permutation(field, [1, 0, 2]))
    assert result.multiplier(diagonal(field, [2, 2, 1])) == 1
    assert not result.contains(diagonal(field, [2, 1, 1]))


def test_stabilizer_of_scaled_form_is_unchanged():
    field = make_field(5)
    f = parse_poly("x1^2*x3 + x2^3 + x2*x3^2", field)
    assert stabilizer(f).order == stabilizer(f.scale(3)).order
    assert hypersurface_id(f.scale(3)) == hypersurface_id(f)


def test_stabilizer_to_dict():
    field = make_field(2)
    document = stabilizer(parse_poly("x1*x2", field)).to_dict()
    assert document["order"] == 2
    assert document["poly"] == "x1*x2"
    assert {e["matrix"] for e in document["elements"]} == {"1,0;0,1", "0,1;1,0"}


def test_stabilizer_budget():
    f = parse_poly("x1*x2 + x3^2", make_field(3))
    with pytest.raises(BudgetExceededError):
        stabilizer(f, budgets=BudgetConfig(max_group_size=100))


def test_zero_form_has_no_id():
    field = make_field(3)
    with pytest.raises(ValueError):
        hypersurface_id(parse_poly("0", field, n=2, d=2))


# -- helpers --


def test_contiguous_ranges():
    assert contiguous_ranges(10, 3) == [(0, 3), (3, 6), (6, 10)]
    assert contiguous_ranges(2, 5) == [(0, 1), (1, 2)]
    assert contiguous_ranges(7, 1) == [(0, 7)]


def test_prefix_length():
    keys = np.array([1, 2, 3, 5, 7, 9, 11, 13, 15])
    assert prefix_length(keys, 2, 4, 2) == 1
    assert prefix_length(keys, 2, 4, 100) == 4


def test_wilson_interval():
    low, high = wilson_interval(5, 10, 0.95)
    assert low == pytest.approx(0.2366, abs=1e-3)
    assert high == pytest.approx(0.7634, abs=1e-3)
    assert wilson_interval(0, 10, 0.95)[0] == 0.0
    with pytest.raises(ValueError):
        wilson_interval(1, 0, 0.95)
    with pytest.raises(ValueError):
        wilson_interval(1, 2, 1.5)


def test_partials_merge_exactly():
    a = OrbitPartial(orbits=1, smooth_orbits=1, smooth_count=3, sum_aut=6, nontrivial=3, groupoid=Fraction(1, 2), rows=[(5, 3, 2, True)])
    b = OrbitPartial(orbits=1, smooth_orbits=1, smooth_count=1, sum_aut=6, nontrivial=1, groupoid=Fraction(1, 6), rows=[(1, 1, 6, True)])
    merged = a.merge(b)
    assert merged.groupoid == Fraction(2, 3)
    assert OrbitPartial.from_dict(merged.to_dict()) == OrbitPartial.from_dict(b.merge(a).to_dict())
    assert GroupPartial(1, 2, 3).merge(GroupPartial(4, 5, 6)) == GroupPartial(5, 7, 9)


# -- exhaustive and group-side censuses --


@pytest.mark.parametrize(
    "n,d,q,smooth,sum_aut,orbits",
    [
        (1, 2, 2, 4, 12, 3),  # split pairs and the irreducible quadric
        (1, 3, 2, 6, 18, None),
        (1, 2, 4, 16, 120, 3),
        (2, 2, 2, 28, 168, None),  # one orbit of smooth conics
    ],
)
def test_small_censuses(n, d, q, smooth, sum_aut, orbits):
    engine = CensusEngine(n, d, q, threads=1)
    report = engine.exhaustive()
    assert report.complete
    assert report.smooth_count == smooth
    assert report.sum_aut == sum_aut
    assert report.groupoid_count * engine.pgl_order == smooth
    assert report.orbit_stabilizer_failures == 0
    assert report.density == Fraction(smooth * (q - 1), q ** engine.basis.size)
    if orbits is not None:
        assert report.orbit_count == orbits
    assert engine.group_side().sum_aut == sum_aut


def test_plane_cubics_mod_2():
    engine = CensusEngine(2, 3, 2, threads=1)
    report = engine.exhaustive()
    assert report.total_hypersurfaces == 1023
    assert report.smooth_count == 336
    assert report.density == zeta_density(2, 2)
    assert report.groupoid_count == 2
    assert report.sum_aut == report.smooth_orbit_count * 168
    assert report.nontrivial_count <= report.sum_aut - report.smooth_count
    assert report.smooth_count <= report.sum_aut <= report.smooth_count + report.fixed_dim_tally
    assert report.ratio_pgl == 2
    assert report.moduli["dimension"] == 2

    group = engine.group_side()
    assert group.mode == "group_side"
    assert group.sum_aut == report.sum_aut
    assert group.nontrivial_count is None


def test_worker_count_does_not_change_results():
    engines = [CensusEngine(2, 3, 2, threads=threads) for threads in (1, 4, 8)]
    exhaustive = {to_json(engine.exhaustive().to_dict()) for engine in engines}
    group_side = {to_json(engine.group_side().to_dict()) for engine in engines}
    assert len(exhaustive) == 1
    assert len(group_side) == 1


@pytest.mark.parametrize("order", [(0, 1, 2), (2, 0, 1), (1, 2, 0)])
def test_shard_order_does_not_change_results(tmp_path, order):
    path = tmp_path / "run.json"
    for shard_index in order:
        report = CensusEngine(2, 3, 2, threads=1, checkpoint_path=path, shards=3, shard_index=shard_index).exhaustive()
    assert report.complete
    assert to_json(report.to_dict()) == to_json(CensusEngine(2, 3, 2, threads=2).exhaustive().to_dict())


def test_orbit_table():
    report = CensusEngine(1, 2, 2, threads=1).exhaustive(orbit_table=True)
    assert [row["size"] for row in report.orbit_table] == [3, 3, 1]
    assert [row["smooth"] for row in report.orbit_table] == [False, True, True]
    assert [row["stabilizer"] for row in report.orbit_table] == [2, 2, 6]
    assert report.orbit_table[0]["representative"] == "x2^2"


def test_report_serialisation():
    report = census_exhaustive(1, 2, 2, threads=1)
    document = report.to_dict()
    assert document["groupoid_count"] == {"num": "2", "den": "3"}
    assert document["average"] == {"num": "3", "den": "1"}
    assert "orbit_table" not in document
    row = report.csv_row()
    assert list(row) == CSV_COLUMNS
    assert (row["smooth"], row["sum_aut"], row["mode"]) == (4, 12, "exhaustive")


def test_group_side_function():
    report = census_group_side(1, 3, 2, threads=1)
    assert report.sum_aut == 18
    assert report.average == 3


def test_space_budget_is_enforced():
    config = FfhypConfig()
    config.budgets.max_space_size = 1000
    with pytest.raises(BudgetExceededError):
        CensusEngine(2, 3, 2, config, threads=1).exhaustive()


def test_bad_shard_arguments():
    with pytest.raises(ValueError):
        CensusEngine(1, 2, 2, shards=2, shard_index=2)


# -- sharding and checkpoints --


def test_sharded_run_resumes_from_checkpoint(tmp_path):
    path = tmp_path / "run.json"
    first = CensusEngine(2, 3, 2, threads=1, checkpoint_path=path, shards=2, shard_index=0)
    partial = first.exhaustive()
    assert not partial.complete
    assert partial.smooth_count is None
    assert 0 < partial.shards_completed < partial.shards_total
    assert path.exists()

    second = CensusEngine(2, 3, 2, threads=1, checkpoint_path=path, shards=2, shard_index=1)
    resumed = second.exhaustive()
    assert resumed.complete
    assert resumed.to_dict() == CensusEngine(2, 3, 2, threads=1).exhaustive().to_dict()


def test_checkpoint_of_other_parameters_is_refused(tmp_path):
    path = tmp_path / "run.json"
    CensusEngine(1, 2, 2, threads=1, checkpoint_path=path).exhaustive()
    with pytest.raises(CheckpointMismatchError):
        CensusEngine(1, 3, 2, threads=1, checkpoint_path=path)


# -- sampling --


def test_sample_is_seeded():
    a = census_sample(2, 4, 2, samples=300, seed=11, threads=1)
    b = census_sample(2, 4, 2, samples=300, seed=11, threads=2)
    assert to_json(a.to_dict()) == to_json(b.to_dict())
    assert a.mode == "sample" and a.seed == 11
    info = a.sample
    assert info["exact"] is False
    assert info["low"] <= float(a.density) <= info["high"]
    assert a.density == Fraction(info["smooth"], 300)


def test_sample_with_stabilizers():
    report = CensusEngine(1, 3, 3, threads=1).sample(200, 3, with_stabilizers=True)
    assert report.complete
    if report.sample["smooth"]:
        assert report.sample["average_aut"] is not None


def test_sample_covering_the_space_is_exact():
    report = CensusEngine(2, 3, 2, threads=1).sample(2000, 1)
    assert report.sample["exact"] is True
    assert report.density == zeta_density(2, 2)
    assert report.sample["low"] == report.sample["high"]


def test_sample_needs_positive_size():
    with pytest.raises(ValueError):
        CensusEngine(1, 2, 2, threads=1).sample(0, 1)


# -- trend --


def test_trend_rows():
    rows = trend(2, 2, [2, 3], threads=1)
    assert [row["d"] for row in rows] == [2, 3]
    assert [row["smooth"] for row in rows] == [28, 336]
    assert rows[1]["density"] == rows[1]["zeta_limit"]
    for row in rows:
        average = Fraction(int(row["average"]["num"]), int(row["average"]["den"]))
        upper = Fraction(int(row["average_upper"]["num"]), int(row["average_upper"]["den"]))
        assert 1 <= average <= upper


@pytest.mark.slow
@pytest.mark.parametrize("n,d,q", [(2, 4, 2), (2, 3, 3)])
def test_double_counting_on_larger_spaces(n, d, q):
    engine = CensusEngine(n, d, q)
    report = engine.exhaustive()
    assert report.sum_aut == engine.group_side().sum_aut
    assert report.orbit_stabilizer_failures == 0
    assert report.groupoid_count * engine.pgl_order == report.smooth_count


@pytest.mark.slow
@pytest.mark.parametrize("n,d,q", [(2, 4, 2), (2, 3, 3)])
def test_worker_count_does_not_change_larger_reports(n, d, q):
    documents = set()
    for threads in (1, 4, 8):
        engine = CensusEngine(n, d, q, threads=threads)
        documents.add(to_json(engine.exhaustive().to_dict()) + to_json(engine.group_side().to_dict()))
    assert len(documents) == 1


@pytest.mark.slow
def test_density_approaches_the_zeta_limit():
    rows = trend(2, 2, [3, 4, 5])
    limit = zeta_density(2, 2)
    assert all(row["zeta_limit"] == {"num": "21", "den": "64"} for row in rows)
    density = Fraction(int(rows[-1]["density"]["num"]), int(rows[-1]["density"]["den"]))
    assert abs(density - limit) <= Fraction(15, 100)


@pytest.mark.parametrize(
    "n,d,q",
    [
        (2, 3, 2),
        pytest.param(2, 4, 2, marks=pytest.mark.slow),
        pytest.param(2, 5, 2, marks=pytest.mark.slow),
        pytest.param(2, 3, 3, marks=pytest.mark.slow),
    ],
)
def test_average_automorphism_count_is_bounded(n, d, q):
    report = CensusEngine(n, d, q).exhaustive()
    upper = 1 + Fraction(report.fixed_dim_tally, report.smooth_count)
    assert 1 <= report.average <= upper
