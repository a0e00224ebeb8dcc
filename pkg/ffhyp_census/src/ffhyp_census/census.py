"""Census of smooth hypersurfaces and their automorphisms.

A :class:`CensusEngine` owns everything shared by the censuses of one
(n, d, q): the field, the monomial basis, the group table, the orbit
decomposition and the fixed-space dimensions. Work is cut into shards and run
on a process pool; each shard returns a partial result and partials merge by
exact addition, so reports do not depend on worker count or completion order.

Stages:
    orbits / orbits_stabilizers: smoothness (and stabilizer order) of every
        orbit representative, sharded by the leading coefficients of the
        representative.
    group_side: smooth members of every P^{A,lam}, sharded by contiguous
        ranges of the group enumeration.
    sample_*: smoothness of seeded uniform coefficient vectors.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
import multiprocessing as mp
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator

import numpy as np
from scipy.stats import norm

from ffhyp_core import projective
from ffhyp_core.config import BudgetConfig, FfhypConfig, SmoothConfig
from ffhyp_core.gf import field_for_order, make_field
from ffhyp_core.group import GroupElem, GroupTable, group_order, group_table
from ffhyp_core.linalg import kernel
from ffhyp_core.polyspace import PolyVec, monomial_basis
from ffhyp_core.textio import format_element, format_matrix, format_poly
from ffhyp_census import bounds
from ffhyp_census.checkpoint import Checkpoint
from ffhyp_census.fixedspace import FixedDimSummary, fixed_dim_table, summarize_fixed_dims
from ffhyp_census.orbits import OrbitDecomposition, orbit_decomposition, space_size_check
from ffhyp_census.report import big, exact, from_exact
from ffhyp_census.smooth import is_smooth

logger = logging.getLogger(__name__)

HypersurfaceId = PolyVec


def hypersurface_id(f: PolyVec) -> HypersurfaceId:
    """The canonical representative of f's scalar class.

    Raises:
        ValueError: If f is zero.
    """
    canon, _ = f.canonical()
    return canon


# -- stabilizers ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StabilizerResult:
    """Aut_{F_q}(X) for X = V(f), as canonical matrices with their multipliers.

    Attributes:
        hypersurface: Canonical form of f.
        elements: Pairs (A, lam) with f o A = lam * f, in enumeration order.
    """

    hypersurface: HypersurfaceId
    elements: list[tuple[GroupElem, int]]

    @property
    def order(self) -> int:
        return len(self.elements)

    def multiplier(self, A: GroupElem) -> int | None:
        """lam for the class of A, or None when A is not in the stabilizer."""
        target = A.canonicalize()
        for B, lam in self.elements:
            if B == target:
                return lam
        return None

    def contains(self, A: GroupElem) -> bool:
        return self.multiplier(A) is not None

    def to_dict(self) -> dict[str, Any]:
        f = self.hypersurface
        return {
            "poly": format_poly(f),
            "n": f.n,
            "d": f.d,
            "q": f.field.q,
            "order": self.order,
            "elements": [
                {"matrix": format_matrix(A.entries, f.field), "lambda": format_element(lam, f.field)}
                for A, lam in self.elements
            ],
        }


def _stabilizer_mask(table: GroupTable, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(mask of table elements fixing the class of coeffs, multipliers); coeffs must be canonical."""
    field = table.field
    images = field.matmul(table.substitution, coeffs)
    lead = int(np.flatnonzero(coeffs)[0])
    lam = images[:, lead]
    mask = (lam != 0) & np.all(images == field.vmul(lam[:, None], coeffs[None, :]), axis=1)
    return mask, lam


def stabilizer(f: PolyVec, table: GroupTable | None = None, budgets: BudgetConfig | None = None) -> StabilizerResult:
    """Every canonical A in PGL_{n+1}(F_q) with f o A a scalar multiple of f.

    Raises:
        ValueError: If f is zero or the table belongs to another field or degree.
        BudgetExceededError: If the group exceeds budgets.max_group_size.
    """
    f = hypersurface_id(f)
    table = table or group_table(f.field, f.basis, budgets)
    if table.field != f.field or table.basis != f.basis:
        raise ValueError("group table was built for another field or degree")
    mask, lam = _stabilizer_mask(table, f.coeffs)
    elements = [(table.element(int(i)), int(lam[i])) for i in np.flatnonzero(mask)]
    return StabilizerResult(f, elements)


# -- partial results -----------------------------------------------------------


@dataclass
class OrbitPartial:
    """Sums over a set of orbits.

    Attributes:
        rows: (representative position, orbit size, stabilizer order or 0, smooth) per orbit.
    """

    orbits: int = 0
    smooth_orbits: int = 0
    smooth_count: int = 0
    sum_aut: int = 0
    nontrivial: int = 0
    groupoid: Fraction = Fraction(0)
    os_failures: int = 0
    rows: list[tuple[int, int, int, bool]] = dataclasses.field(default_factory=list)

    def merge(self, other: "OrbitPartial") -> "OrbitPartial":
        return OrbitPartial(
            orbits=self.orbits + other.orbits,
            smooth_orbits=self.smooth_orbits + other.smooth_orbits,
            smooth_count=self.smooth_count + other.smooth_count,
            sum_aut=self.sum_aut + other.sum_aut,
            nontrivial=self.nontrivial + other.nontrivial,
            groupoid=self.groupoid + other.groupoid,
            os_failures=self.os_failures + other.os_failures,
            rows=self.rows + other.rows,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "orbits": self.orbits,
            "smooth_orbits": self.smooth_orbits,
            "smooth_count": self.smooth_count,
            "sum_aut": self.sum_aut,
            "nontrivial": self.nontrivial,
            "groupoid": exact(self.groupoid),
            "os_failures": self.os_failures,
            "rows": [list(row) for row in sorted(self.rows)],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "OrbitPartial":
        return cls(
            orbits=data["orbits"],
            smooth_orbits=data["smooth_orbits"],
            smooth_count=data["smooth_count"],
            sum_aut=data["sum_aut"],
            nontrivial=data["nontrivial"],
            groupoid=from_exact(data["groupoid"]),
            os_failures=data["os_failures"],
            rows=[(int(p), int(s), int(a), bool(m)) for p, s, a, m in data["rows"]],
        )


@dataclass
class GroupPartial:
    """Sums over a set of (A, lam) pairs with A != I.

    Attributes:
        pairs: Pairs with a nonzero fixed space.
        classes: Scalar classes of nonzero fixed forms enumerated.
        smooth_classes: Those defining a smooth hypersurface.
    """

    pairs: int = 0
    classes: int = 0
    smooth_classes: int = 0

    def merge(self, other: "GroupPartial") -> "GroupPartial":
        return GroupPartial(
            self.pairs + other.pairs,
            self.classes + other.classes,
            self.smooth_classes + other.smooth_classes,
        )

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GroupPartial":
        return cls(**data)


@dataclass
class SamplePartial:
    """Sums over a set of sampled coefficient vectors.

    Attributes:
        samples: Vectors drawn.
        smooth: Vectors defining a smooth hypersurface (zero counts as singular).
        aut_total: Sum of |Aut| over smooth vectors, when stabilizers are computed.
    """

    samples: int = 0
    smooth: int = 0
    aut_total: int = 0

    def merge(self, other: "SamplePartial") -> "SamplePartial":
        return SamplePartial(
            self.samples + other.samples,
            self.smooth + other.smooth,
            self.aut_total + other.aut_total,
        )

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SamplePartial":
        return cls(**data)


@dataclass
class StageResult:
    """Merged partial of one stage with its shard progress."""

    partial: Any
    completed: int
    total: int

    @property
    def complete(self) -> bool:
        return self.completed == self.total


# -- workers -------------------------------------------------------------------

_WORKER: dict[str, Any] = {}


def _init_worker(
    p: int,
    k: int,
    n: int,
    d: int,
    budgets: dict[str, int],
    smooth: dict[str, Any],
    smooth_ids: np.ndarray | None,
) -> None:
    """Build the per-process read-only state; the group table is built on first use."""
    budget_config = BudgetConfig(**budgets)
    _WORKER.clear()
    _WORKER.update(
        field=make_field(p, k, budget_config),
        basis=monomial_basis(n, d, budget_config),
        budgets=budget_config,
        smooth=dataclasses.replace(SmoothConfig(**smooth), witness_search=False),
        smooth_ids=smooth_ids,
    )


def _worker_table() -> GroupTable:
    return group_table(_WORKER["field"], _WORKER["basis"], _WORKER["budgets"])


def _orbit_shard(task: tuple[int, np.ndarray, np.ndarray, bool]) -> tuple[int, OrbitPartial]:
    shard_id, positions, sizes, with_stabilizers = task
    field, basis = _WORKER["field"], _WORKER["basis"]
    table = _worker_table() if with_stabilizers else None
    pgl = group_order(basis.n, field.q, "PGL")
    vectors = projective.decode(field.q, projective.key_at(field.q, positions, basis.size), basis.size)
    partial = OrbitPartial()
    for position, size, coeffs in zip(positions.tolist(), sizes.tolist(), vectors):
        smooth = is_smooth(PolyVec(field, basis, coeffs), _WORKER["smooth"], _WORKER["budgets"]).smooth
        stab = 0
        if table is not None:
            stab = int(np.count_nonzero(_stabilizer_mask(table, coeffs)[0]))
            if size * stab != pgl:
                partial.os_failures += 1
                logger.warning("Orbit-stabilizer mismatch at position %d: %d * %d != %d", position, size, stab, pgl)
        partial.orbits += 1
        if smooth:
            partial.smooth_orbits += 1
            partial.smooth_count += size
            if stab:
                partial.sum_aut += size * stab
                partial.nontrivial += size if stab > 1 else 0
                partial.groupoid += Fraction(1, stab)
        partial.rows.append((position, size, stab, smooth))
    logger.debug("Orbit shard %d: %d orbits, %d smooth", shard_id, partial.orbits, partial.smooth_orbits)
    return shard_id, partial


def _group_shard(task: tuple[int, int, np.ndarray, int]) -> tuple[int, GroupPartial]:
    shard_id, start, dims, span_chunk = task
    field, basis = _WORKER["field"], _WORKER["basis"]
    smooth_ids = _WORKER["smooth_ids"]
    table = _worker_table()
    identity = table.identity_index
    eye = np.eye(basis.size, dtype=np.int64)
    partial = GroupPartial()
    for offset, row in enumerate(dims):
        index = start + offset
        if index == identity:
            continue
        for lam in (np.flatnonzero(row) + 1).tolist():
            shifted = field.vsub(table.substitution[index], field.vscale(lam, eye))
            dim, span = kernel(shifted, field)
            partial.pairs += 1
            # one canonical combination per scalar class of the span
            for _, keys in projective.iter_chunks(field.q, dim, span_chunk):
                combos = projective.decode(field.q, keys, dim)
                forms, _ = projective.canonicalize(field, field.matmul(combos, span))
                ids = projective.index_of(field.q, projective.encode(field.q, forms), basis.size)
                partial.classes += len(ids)
                partial.smooth_classes += int(np.count_nonzero(smooth_ids[ids]))
    logger.debug("Group shard %d: %d pairs, %d smooth classes", shard_id, partial.pairs, partial.smooth_classes)
    return shard_id, partial


def _sample_shard(task: tuple[int, np.ndarray, bool]) -> tuple[int, SamplePartial]:
    shard_id, vectors, with_stabilizers = task
    field, basis = _WORKER["field"], _WORKER["basis"]
    table = _worker_table() if with_stabilizers else None
    canon, _ = projective.canonicalize(field, vectors)
    verdicts: dict[bytes, tuple[bool, int]] = {}
    partial = SamplePartial(samples=len(vectors))
    for row in canon:
        if not row.any():
            continue
        key = row.tobytes()
        if key not in verdicts:
            smooth = is_smooth(PolyVec(field, basis, row), _WORKER["smooth"], _WORKER["budgets"]).smooth
            stab = int(np.count_nonzero(_stabilizer_mask(table, row)[0])) if smooth and table is not None else 0
            verdicts[key] = (smooth, stab)
        smooth, stab = verdicts[key]
        if smooth:
            partial.smooth += 1
            partial.aut_total += stab
    return shard_id, partial


# -- sharding ------------------------------------------------------------------


def prefix_length(keys: np.ndarray, q: int, size: int, target: int) -> int:
    """Smallest t giving at least target distinct leading-t-coefficient prefixes, else size."""
    for t in range(1, size + 1):
        if len(np.unique(keys // q ** (size - t))) >= target:
            return t
    return size


def contiguous_ranges(count: int, shards: int) -> list[tuple[int, int]]:
    """Split range(count) into at most shards non-empty contiguous ranges."""
    shards = max(1, min(shards, count))
    edges = [count * i // shards for i in range(shards + 1)]
    return [(lo, hi) for lo, hi in zip(edges, edges[1:]) if hi > lo]


def wilson_interval(successes: int, trials: int, confidence: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Raises:
        ValueError: If trials < 1 or confidence is outside (0, 1).
    """
    if trials < 1:
        raise ValueError("the interval needs at least one trial")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    z = float(norm.ppf(0.5 + confidence / 2))
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# -- reports -------------------------------------------------------------------


@dataclass
class CensusReport:
    """Measured quantities of one census; fields a mode does not produce stay None.

    Attributes:
        mode: "exhaustive", "group_side" or "sample".
        complete: False when some shards are still outstanding; derived fields are then None.
        smooth_count: Smooth hypersurfaces |S_{n,d}|.
        smooth_polynomials: Smooth nonzero polynomials, (q-1) * smooth_count.
        sum_aut: Sum of |Aut| over smooth hypersurfaces.
        polynomial_sum_aut: (q-1) * sum_aut, the polynomial-side tally.
        density: smooth_polynomials / q^binom(d+n, n).
        orbit_count: All PGL orbits of hypersurfaces.
        smooth_orbit_count: Orbits of smooth hypersurfaces.
        groupoid_count: Sum over smooth orbits of 1/|Stab|.
        ratio_pgl: smooth_count / |PGL_{n+1}(F_q)|.
        ratio_gl: smooth_count / |GL_{n+1}(F_q)|.
        fixed_dim_tally: Sum of q^dim P^{A,lam} over non-scalar pairs.
    """

    n: int
    d: int
    q: int
    mode: str
    total_hypersurfaces: int
    complete: bool = True
    shards_completed: int | None = None
    shards_total: int | None = None
    seed: int | None = None
    smooth_count: int | None = None
    smooth_polynomials: int | None = None
    sum_aut: int | None = None
    polynomial_sum_aut: int | None = None
    nontrivial_count: int | None = None
    average: Fraction | None = None
    density: Fraction | None = None
    orbit_count: int | None = None
    smooth_orbit_count: int | None = None
    groupoid_count: Fraction | None = None
    ratio_pgl: Fraction | None = None
    ratio_gl: Fraction | None = None
    max_fixed_dim: int | None = None
    max_fixed_witness: dict[str, Any] | None = None
    fixed_dim_tally: int | None = None
    thm5_bound: int | None = None
    thm5_violation_count: int | None = None
    zeta_limit: Fraction | None = None
    moduli: dict[str, Any] | None = None
    orbit_stabilizer_failures: int | None = None
    sample: dict[str, Any] | None = None
    orbit_table: list[dict[str, Any]] | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if isinstance(value, Fraction):
                value = exact(value)
            elif isinstance(value, int) and not isinstance(value, bool):
                value = big(value)
            out[item.name] = value
        if self.orbit_table is None:
            del out["orbit_table"]
        return out

    def csv_row(self) -> dict[str, Any]:
        def part(value: Fraction | None, which: str) -> int | None:
            return None if value is None else getattr(value, which)

        return {
            "n": self.n,
            "d": self.d,
            "q": self.q,
            "total": self.total_hypersurfaces,
            "smooth": self.smooth_count,
            "sum_aut": self.sum_aut,
            "nontrivial": self.nontrivial_count,
            "average_num": part(self.average, "numerator"),
            "average_den": part(self.average, "denominator"),
            "density_num": part(self.density, "numerator"),
            "density_den": part(self.density, "denominator"),
            "orbits": self.orbit_count,
            "groupoid_num": part(self.groupoid_count, "numerator"),
            "groupoid_den": part(self.groupoid_count, "denominator"),
            "max_fixed_dim": self.max_fixed_dim,
            "mode": self.mode,
            "seed": self.seed,
        }


# -- engine --------------------------------------------------------------------


class CensusEngine:
    """Shared state and stage runner for the censuses of one (n, d, q).

    Args:
        n: Projective dimension.
        d: Degree.
        q: Field order, an int or "p^k".
        config: Loaded configuration (defaults when None).
        threads: Worker processes; falls back to config, then to the core count.
        checkpoint_path: Checkpoint file for resumable runs.
        shards: Split the shard list, in ascending id order, into this many classes...
        shard_index: ...and run only the i-th shards with i % shards == shard_index.
        run: Label bound into the checkpoint parameters (the subcommand).

    Raises:
        ValueError: On invalid parameters.
        BudgetExceededError: If the field or basis exceeds its budget.
    """

    def __init__(
        self,
        n: int,
        d: int,
        q: int | str,
        config: FfhypConfig | None = None,
        *,
        threads: int | None = None,
        checkpoint_path: str | os.PathLike[str] | None = None,
        shards: int = 1,
        shard_index: int = 0,
        run: str = "census",
    ):
        if shards < 1 or not 0 <= shard_index < shards:
            raise ValueError(f"need 0 <= shard_index < shards, got {shard_index} and {shards}")
        self.config = config or FfhypConfig()
        self.field = field_for_order(q, self.config.budgets)
        self.basis = monomial_basis(n, d, self.config.budgets)
        self.threads = threads or self.config.census.threads or os.cpu_count() or 1
        self.shards = shards
        self.shard_index = shard_index
        params = {"run": run, "n": n, "d": d, "q": self.field.q, "e_max": self.config.smooth.e_max}
        self.checkpoint = Checkpoint(checkpoint_path, params)
        self._stages: dict[str, StageResult] = {}

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def pgl_order(self) -> int:
        return group_order(self.n, self.q, "PGL")

    @property
    def gl_order(self) -> int:
        return group_order(self.n, self.q, "GL")

    @property
    def total_hypersurfaces(self) -> int:
        return projective.id_count(self.q, self.basis.size)

    def check_group_budget(self) -> None:
        self.config.budgets.check(f"|PGL_{self.n + 1}(F_{self.q})|", self.pgl_order, "max_group_size")

    def check_space_budget(self) -> None:
        space_size_check(self.field, self.basis, self.config.budgets)

    @functools.cached_property
    def table(self) -> GroupTable:
        return group_table(self.field, self.basis, self.config.budgets)

    @functools.cached_property
    def orbits(self) -> OrbitDecomposition:
        return orbit_decomposition(self.field, self.basis, self.config.budgets)

    @functools.cached_property
    def fixed_dims(self) -> np.ndarray:
        return fixed_dim_table(self.table)

    @functools.cached_property
    def fixed_summary(self) -> FixedDimSummary:
        return summarize_fixed_dims(self.table, self.fixed_dims)

    def stabilizer(self, f: PolyVec) -> StabilizerResult:
        return stabilizer(f, self.table)

    @property
    def _target_shards(self) -> int:
        return self.config.census.shards

    def _map(self, worker: Callable, tasks: list, smooth_ids: np.ndarray | None) -> Iterator:
        if not tasks:
            return
        init_args = (
            self.field.p, self.field.k, self.n, self.d,
            dataclasses.asdict(self.config.budgets), dataclasses.asdict(self.config.smooth), smooth_ids,
        )
        processes = min(self.threads, len(tasks))
        if processes == 1:
            _init_worker(*init_args)
            for task in tasks:
                yield worker(task)
            return
        with mp.Pool(processes=processes, initializer=_init_worker, initargs=init_args) as pool:
            yield from pool.imap_unordered(worker, tasks)

    def _run_stage(
        self,
        stage: str,
        layout: dict[str, Any],
        tasks: dict[int, tuple],
        worker: Callable,
        partial_cls: type,
        smooth_ids: np.ndarray | None = None,
    ) -> StageResult:
        if stage in self._stages:
            return self._stages[stage]
        completed = self.checkpoint.completed(stage) & set(tasks)
        saved = self.checkpoint.partial(stage)
        merged = partial_cls() if saved is None else partial_cls.from_dict(saved)
        mine = [sid for i, sid in enumerate(sorted(tasks)) if i % self.shards == self.shard_index]
        todo = [sid for sid in mine if sid not in completed]
        logger.info(
            "Stage %s: %d shards, %d complete, %d to run on %d workers",
            stage, len(tasks), len(completed), len(todo), min(self.threads, max(1, len(todo))),
        )
        for shard_id, result in self._map(worker, [tasks[sid] for sid in todo], smooth_ids):
            merged = merged.merge(result)
            completed.add(shard_id)
            self.checkpoint.record(stage, layout, completed, merged.to_dict())
            logger.info("Stage %s: shard %d done (%d/%d)", stage, shard_id, len(completed), len(tasks))
        result = StageResult(merged, len(completed), len(tasks))
        if result.complete:
            self._stages[stage] = result
        return result

    # -- stages --

    def orbit_pass(self, with_stabilizers: bool = True) -> StageResult:
        """Smoothness, and optionally stabilizer order, of every orbit representative."""
        if not with_stabilizers and "orbits_stabilizers" in self._stages:
            return self._stages["orbits_stabilizers"]
        stage = "orbits_stabilizers" if with_stabilizers else "orbits"
        if stage in self._stages:
            return self._stages[stage]
        self.check_space_budget()
        if with_stabilizers:
            self.check_group_budget()
        orbits = self.orbits
        keys = orbits.representative_keys()
        layout = self.checkpoint.layout(stage) or {
            "prefix_length": prefix_length(keys, self.q, self.basis.size, self._target_shards)
        }
        prefixes = keys // self.q ** (self.basis.size - layout["prefix_length"])
        tasks = {}
        for shard_id in np.unique(prefixes).tolist():
            chosen = prefixes == shard_id
            tasks[int(shard_id)] = (int(shard_id), orbits.representatives[chosen], orbits.sizes[chosen], with_stabilizers)
        return self._run_stage(stage, layout, tasks, _orbit_shard, OrbitPartial)

    def smooth_ids(self) -> np.ndarray:
        """Boolean smoothness per hypersurface id, from a complete orbit pass.

        Raises:
            RuntimeError: If the orbit pass is incomplete.
        """
        result = self.orbit_pass(with_stabilizers=False)
        if not result.complete:
            raise RuntimeError("the orbit pass has outstanding shards")
        orbits = self.orbits
        smooth_orbit = np.zeros(orbits.count, dtype=bool)
        for position, _, _, smooth in result.partial.rows:
            smooth_orbit[orbits.labels[position]] = smooth
        return smooth_orbit[orbits.labels]

    def group_pass(self) -> StageResult:
        """Smooth classes in P^{A,lam} over every A != I and every lam."""
        self.check_group_budget()
        dims = self.fixed_dims
        layout = self.checkpoint.layout("group_side") or {"shards": min(len(self.table), self._target_shards)}
        tasks = {
            i: (i, lo, dims[lo:hi], self.config.census.span_chunk)
            for i, (lo, hi) in enumerate(contiguous_ranges(len(self.table), layout["shards"]))
        }
        return self._run_stage("group_side", layout, tasks, _group_shard, GroupPartial, self.smooth_ids())

    def sample_pass(self, samples: int, seed: int, with_stabilizers: bool) -> StageResult:
        """Smoothness of samples uniform coefficient vectors drawn with numpy's default_rng(seed)."""
        if samples < 1:
            raise ValueError(f"samples must be >= 1, got {samples}")
        if with_stabilizers:
            self.check_group_budget()
            _ = self.table
        stage = f"sample_{samples}_{seed}_{int(with_stabilizers)}"
        vectors = np.random.default_rng(seed).integers(0, self.q, size=(samples, self.basis.size), dtype=np.int64)
        layout = self.checkpoint.layout(stage) or {"shards": min(samples, self._target_shards)}
        tasks = {
            i: (i, vectors[lo:hi], with_stabilizers)
            for i, (lo, hi) in enumerate(contiguous_ranges(samples, layout["shards"]))
        }
        return self._run_stage(stage, layout, tasks, _sample_shard, SamplePartial)

    # -- reports --

    def _orbit_report(self, mode: str, result: StageResult, stabilizers: bool, orbit_table: bool = False) -> CensusReport:
        report = CensusReport(
            n=self.n,
            d=self.d,
            q=self.q,
            mode=mode,
            total_hypersurfaces=self.total_hypersurfaces,
            complete=result.complete,
            shards_completed=result.completed,
            shards_total=result.total,
            zeta_limit=bounds.zeta_density(self.n, self.q),
        )
        if not result.complete:
            logger.warning("Stage incomplete: %d of %d shards", result.completed, result.total)
            return report
        partial: OrbitPartial = result.partial
        smooth = partial.smooth_count
        report.smooth_count = smooth
        report.smooth_polynomials = smooth * (self.q - 1)
        report.density = Fraction(report.smooth_polynomials, self.q**self.basis.size)
        report.orbit_count = partial.orbits
        report.smooth_orbit_count = partial.smooth_orbits
        report.ratio_pgl = Fraction(smooth, self.pgl_order)
        report.ratio_gl = Fraction(smooth, self.gl_order)
        if stabilizers:
            report.sum_aut = partial.sum_aut
            report.polynomial_sum_aut = partial.sum_aut * (self.q - 1)
            report.nontrivial_count = partial.nontrivial
            report.average = Fraction(partial.sum_aut, smooth) if smooth else None
            report.groupoid_count = partial.groupoid
            report.orbit_stabilizer_failures = partial.os_failures
            report.moduli = self._moduli(partial.groupoid)
        if orbit_table:
            report.orbit_table = self.orbit_rows(partial)
        return report

    def _moduli(self, groupoid: Fraction) -> dict[str, Any] | None:
        if self.n < 2 or self.d < 3:
            return None
        dim, estimate = bounds.moduli_estimate(self.n, self.d, self.q)
        return {"dimension": dim, "estimate": big(estimate), "groupoid_count": exact(groupoid)}

    def _fixed_fields(self, report: CensusReport) -> None:
        summary = self.fixed_summary
        report.max_fixed_dim = summary.max_dim
        if summary.max_witness is not None:
            index, lam = summary.max_witness
            report.max_fixed_witness = {
                "matrix": format_matrix(self.table.elements[index], self.field),
                "lambda": format_element(lam, self.field),
                "dim": summary.max_dim,
            }
        report.fixed_dim_tally = summary.tally
        report.thm5_bound = bounds.thm5_bound(self.n, self.d)
        report.thm5_violation_count = summary.thm5_violation_count
        if summary.thm5_violation_count:
            logger.warning(
                "%d pairs exceed the non-scalar fixed-space bound %d (max %s)",
                summary.thm5_violation_count, report.thm5_bound, summary.max_dim,
            )

    def orbit_rows(self, partial: OrbitPartial) -> list[dict[str, Any]]:
        """One row per orbit: representative, size, stabilizer order, smoothness."""
        rows = []
        for position, size, stab, smooth in sorted(partial.rows):
            key = projective.key_at(self.q, np.array([position]), self.basis.size)
            coeffs = projective.decode(self.q, key, self.basis.size)[0]
            rows.append({
                "representative": format_poly(PolyVec(self.field, self.basis, coeffs)),
                "size": size,
                "stabilizer": stab or None,
                "smooth": smooth,
            })
        return rows

    def exhaustive(self, orbit_table: bool = False) -> CensusReport:
        """Every hypersurface: smoothness, stabilizers, orbits and the fixed-space summary.

        Raises:
            BudgetExceededError: If the space or the group exceeds its budget.
        """
        self.check_space_budget()
        self.check_group_budget()
        result = self.orbit_pass(with_stabilizers=True)
        report = self._orbit_report("exhaustive", result, stabilizers=True, orbit_table=orbit_table)
        if report.complete:
            self._fixed_fields(report)
            logger.info(
                "Census (%d, %d, %d): %d smooth of %d, sum |Aut| = %d",
                self.n, self.d, self.q, report.smooth_count, report.total_hypersurfaces, report.sum_aut,
            )
        return report

    def group_side(self) -> CensusReport:
        """sum |Aut| by counting, for every (A, lam), the smooth hypersurfaces in P^{A,lam}.

        Raises:
            BudgetExceededError: If the space or the group exceeds its budget.
        """
        self.check_space_budget()
        self.check_group_budget()
        orbit_result = self.orbit_pass(with_stabilizers=False)
        report = self._orbit_report("group_side", orbit_result, stabilizers=False)
        if not report.complete:
            return report
        group_result = self.group_pass()
        report.complete = group_result.complete
        report.shards_completed = orbit_result.completed + group_result.completed
        report.shards_total = orbit_result.total + group_result.total
        if not group_result.complete:
            logger.warning("Group-side stage incomplete: %d of %d shards", group_result.completed, group_result.total)
            return report
        # the identity fixes every hypersurface, with lam = 1 only
        sum_aut = group_result.partial.smooth_classes + report.smooth_count
        report.sum_aut = sum_aut
        report.polynomial_sum_aut = sum_aut * (self.q - 1)
        report.average = Fraction(sum_aut, report.smooth_count) if report.smooth_count else None
        self._fixed_fields(report)
        logger.info("Group-side census (%d, %d, %d): sum |Aut| = %d", self.n, self.d, self.q, sum_aut)
        return report

    def sample(
        self,
        samples: int | None = None,
        seed: int | None = None,
        with_stabilizers: bool | None = None,
    ) -> CensusReport:
        """Density estimate from seeded uniform samples, with a Wilson interval.

        When samples >= q^binom(d+n, n) the whole space is enumerated instead
        and the interval collapses to the exact density.
        """
        census = self.config.census
        samples = census.samples if samples is None else samples
        seed = census.seed if seed is None else seed
        with_stabilizers = census.with_stabilizers if with_stabilizers is None else with_stabilizers
        if samples < 1:
            raise ValueError(f"samples must be >= 1, got {samples}")
        space = self.q**self.basis.size
        info: dict[str, Any] = {"size": samples, "seed": seed, "confidence": census.confidence}

        if samples >= space:
            report = self._orbit_report("sample", self.orbit_pass(with_stabilizers), with_stabilizers)
            report.seed = seed
            if report.complete:
                info.update(
                    smooth=report.smooth_polynomials,
                    low=float(report.density),
                    high=float(report.density),
                    exact=True,
                    average_aut=exact(report.average),
                )
            report.sample = info
            return report

        result = self.sample_pass(samples, seed, with_stabilizers)
        report = CensusReport(
            n=self.n,
            d=self.d,
            q=self.q,
            mode="sample",
            total_hypersurfaces=self.total_hypersurfaces,
            complete=result.complete,
            shards_completed=result.completed,
            shards_total=result.total,
            seed=seed,
            zeta_limit=bounds.zeta_density(self.n, self.q),
        )
        if result.complete:
            partial: SamplePartial = result.partial
            low, high = wilson_interval(partial.smooth, partial.samples, census.confidence)
            report.density = Fraction(partial.smooth, partial.samples)
            info.update(
                smooth=partial.smooth,
                low=low,
                high=high,
                exact=False,
                average_aut=exact(Fraction(partial.aut_total, partial.smooth))
                if with_stabilizers and partial.smooth
                else None,
            )
            logger.info("Sampled %d forms: %d smooth, interval [%.4f, %.4f]", partial.samples, partial.smooth, low, high)
        report.sample = info
        return report


def census_exhaustive(n: int, d: int, q: int | str, config: FfhypConfig | None = None, **engine_options: Any) -> CensusReport:
    return CensusEngine(n, d, q, config, **engine_options).exhaustive()


def census_group_side(n: int, d: int, q: int | str, config: FfhypConfig | None = None, **engine_options: Any) -> CensusReport:
    return CensusEngine(n, d, q, config, **engine_options).group_side()


def census_sample(
    n: int,
    d: int,
    q: int | str,
    samples: int,
    seed: int,
    config: FfhypConfig | None = None,
    **engine_options: Any,
) -> CensusReport:
    return CensusEngine(n, d, q, config, **engine_options).sample(samples, seed)


def trend(
    n: int,
    q: int | str,
    degrees: list[int],
    config: FfhypConfig | None = None,
    threads: int | None = None,
) -> list[dict[str, Any]]:
    """Exhaustive censuses over several degrees, one row per degree.

    Each row carries the exact density beside the zeta-product limit, and the
    average |Aut| beside its group-side upper bound 1 + sum q^dim / |S|.
    """
    rows = []
    for d in degrees:
        engine = CensusEngine(n, d, q, config, threads=threads, run="trend")
        report = engine.exhaustive()
        smooth = report.smooth_count
        rows.append({
            "n": n,
            "d": d,
            "q": engine.q,
            "smooth": smooth,
            "sum_aut": report.sum_aut,
            "density": exact(report.density),
            "zeta_limit": exact(report.zeta_limit),
            "average": exact(report.average),
            "average_upper": exact(1 + Fraction(engine.fixed_summary.tally, smooth)) if smooth else None,
        })
    return rows


__all__ = [
    "CensusEngine",
    "CensusReport",
    "GroupPartial",
    "HypersurfaceId",
    "OrbitPartial",
    "SamplePartial",
    "StabilizerResult",
    "StageResult",
    "census_exhaustive",
    "census_group_side",
    "census_sample",
    "contiguous_ranges",
    "hypersurface_id",
    "prefix_length",
    "stabilizer",
    "trend",
    "wilson_interval",
]
