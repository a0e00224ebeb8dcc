"""Pass/fail checks of the counting bounds against a full census.

Each check yields a record {check, status, detail, witness}. Status "fail"
on any record makes the CLI exit with code 2; "info" records never fail.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ffhyp_core.textio import format_element, format_matrix
from ffhyp_census import bounds
from ffhyp_census.census import CensusEngine
from ffhyp_census.fixedspace import reflection_probe

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
INFO = "info"


@dataclass
class VerificationLog:
    """Ordered check records of one (n, d, q)."""

    n: int
    d: int
    q: int
    records: list[dict[str, Any]] = field(default_factory=list)

    def add(self, check: str, ok: bool | None, detail: str, witness: Any = None) -> None:
        status = INFO if ok is None else (PASS if ok else FAIL)
        if status == FAIL:
            logger.warning("Check %s failed: %s", check, detail)
        self.records.append({"check": check, "status": status, "detail": detail, "witness": witness})

    @property
    def passed(self) -> bool:
        return all(record["status"] != FAIL for record in self.records)

    def status(self, check: str) -> str:
        for record in self.records:
            if record["check"] == check:
                return record["status"]
        raise KeyError(check)

    def record(self, check: str) -> dict[str, Any]:
        for record in self.records:
            if record["check"] == check:
                return record
        raise KeyError(check)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "d": self.d, "q": self.q, "passed": self.passed, "checks": self.records}


def _pair_witnesses(engine: CensusEngine, pairs: list[tuple[int, int, int]]) -> list[dict[str, Any]]:
    return [
        {
            "matrix": format_matrix(engine.table.elements[index], engine.field),
            "lambda": format_element(lam, engine.field),
            "dim": dim,
        }
        for index, lam, dim in pairs
    ]


def verify_bounds(engine: CensusEngine) -> VerificationLog:
    """Run both censuses on the engine and check every bound and identity.

    Raises:
        BudgetExceededError: If the space or the group exceeds its budget.
    """
    n, d, q = engine.n, engine.d, engine.q
    log = VerificationLog(n, d, q)
    exhaustive = engine.exhaustive()
    group_side = engine.group_side()
    if not (exhaustive.complete and group_side.complete):
        raise RuntimeError("verification needs complete censuses; rerun without --shards")

    summary = engine.fixed_summary
    thm5 = bounds.thm5_bound(n, d)
    log.add(
        "thm5_dim_bound",
        summary.thm5_violation_count == 0,
        f"max dim over non-scalar pairs {summary.max_dim} vs bound {thm5}; "
        f"{summary.thm5_violation_count} pairs above the bound",
        _pair_witnesses(engine, summary.thm5_violations) or None,
    )

    threshold = bounds.lemma6_threshold(n, d)
    log.add(
        "lemma6_diagonal",
        summary.lemma6_violation_count == 0,
        f"{summary.lemma6_violation_count} non-diagonal pairs with dim >= {threshold}",
        _pair_witnesses(engine, summary.lemma6_violations) or None,
    )

    lemma7 = bounds.lemma7_bound(n, d)
    diagonal_ok = summary.diagonal_max is None or summary.diagonal_max <= lemma7
    diagonal_witness = None
    if summary.diagonal_witness is not None:
        index, lam = summary.diagonal_witness
        diagonal_witness = _pair_witnesses(engine, [(index, lam, summary.diagonal_max)])
    log.add(
        "lemma7_diagonal_bound",
        diagonal_ok,
        f"max dim over diagonal non-scalar pairs {summary.diagonal_max} vs bound {lemma7}",
        diagonal_witness,
    )

    smooth = exhaustive.smooth_count
    sum_aut = exhaustive.sum_aut
    upper = smooth + summary.tally
    log.add(
        "sandwich",
        smooth <= sum_aut <= upper,
        f"{smooth} <= {sum_aut} <= {upper}",
    )

    nontrivial = exhaustive.nontrivial_count
    log.add(
        "thm2_proof_step",
        nontrivial <= sum_aut - smooth,
        f"nontrivial {nontrivial} <= sum |Aut| - |S| = {sum_aut - smooth}",
    )

    exponent = bounds.thm2_exponent(n, d)
    log.add(
        "thm2_count_bound",
        bounds.below_power(nontrivial, q, exponent),
        f"nontrivial {nontrivial} < q^{exponent}",
    )

    log.add(
        "double_counting",
        exhaustive.sum_aut == group_side.sum_aut,
        f"orbit side {exhaustive.sum_aut}, group side {group_side.sum_aut}",
    )

    groupoid = exhaustive.groupoid_count
    log.add(
        "burnside",
        groupoid * engine.pgl_order == Fraction(smooth),
        f"groupoid count {groupoid} * |PGL| {engine.pgl_order} vs |S| {smooth}",
    )

    log.add(
        "orbit_stabilizer",
        exhaustive.orbit_stabilizer_failures == 0,
        f"{exhaustive.orbit_stabilizer_failures} of {exhaustive.orbit_count} orbits with |orbit| * |stab| != |PGL|",
    )

    probe = reflection_probe(engine.field, n, d)
    log.add(
        "reflection_probe",
        None,
        f"reflection fixed-space dims vs diagonal bound {lemma7}" if probe else "no reflections in characteristic 2",
        probe or None,
    )
    logger.info(
        "Verification (%d, %d, %d): %d checks, %s",
        n, d, q, len(log.records), "all passed" if log.passed else "failures found",
    )
    return log


__all__ = ["FAIL", "INFO", "PASS", "VerificationLog", "verify_bounds"]
