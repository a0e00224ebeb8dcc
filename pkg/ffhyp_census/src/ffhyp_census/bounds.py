"""Closed-form bounds, thresholds, identities and estimates, all in exact arithmetic.

Integers are Python ints and rationals are :class:`fractions.Fraction`; the
only floating point values are the reference error scale and delta windows
whose logarithm is irrational, and neither is ever compared against census
data.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any

from sympy import integer_log, perfect_power

from ffhyp_core.gf import parse_prime_power
from ffhyp_census.report import exact

logger = logging.getLogger(__name__)

EXCEPTIONAL_PAIRS = frozenset({(2, 3), (3, 4)})


def _check_nd(n: int, d: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")


def _prime_power(q: int) -> int:
    p, k = parse_prime_power(q)
    return p**k


def space_dim(n: int, d: int) -> int:
    """dim P_d = binom(d+n, n)."""
    return comb(d + n, n)


def thm5_bound(n: int, d: int) -> int:
    """Upper bound on dim P^{A,lam} for non-scalar A: binom(d+n, n) - binom(d - floor(d/2) + n, n)."""
    _check_nd(n, d)
    return comb(d + n, n) - comb(d - d // 2 + n, n)


def lemma6_threshold(n: int, d: int) -> int:
    """Dimension from which A is forced to be diagonal: thm5_bound + 1."""
    return thm5_bound(n, d) + 1


def lemma7_bound(n: int, d: int) -> Fraction:
    """Bound for diagonal non-scalar A: (binom(d+n-1, n-1) + binom(d+n, n)) / 2."""
    _check_nd(n, d)
    return Fraction(comb(d + n - 1, n - 1) + comb(d + n, n), 2)


def lemma7_asymptotic(n: int, d: int) -> Fraction:
    """(1 - d/(2(d+n))) * binom(d+n, n); equal to :func:`lemma7_bound`."""
    _check_nd(n, d)
    return (1 - Fraction(d, 2 * (d + n))) * comb(d + n, n)


def density_constant(n: int) -> Fraction:
    """C = 1 - 1/2^n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 1 - Fraction(1, 2**n)


def thm2_exponent(n: int, d: int) -> Fraction:
    """C * binom(n+d, d) + (n+1)^2."""
    _check_nd(n, d)
    return density_constant(n) * comb(n + d, d) + (n + 1) ** 2


def proof_exponent(n: int, d: int) -> int:
    """binom(d+n, n) - binom(d - floor(d/2) + n - 1, n) + (n+1)^2, the exponent used in the counting argument."""
    _check_nd(n, d)
    return comb(d + n, n) - comb(d - d // 2 + n - 1, n) + (n + 1) ** 2


def below_power(count: int, q: int, exponent: Fraction | int) -> bool:
    """Exact test count < q^exponent for a nonnegative count and rational exponent."""
    exponent = Fraction(exponent)
    if count < 0:
        raise ValueError("count must be nonnegative")
    if exponent >= 0:
        return count**exponent.denominator < q**exponent.numerator
    return count**exponent.denominator * q ** (-exponent.numerator) < 1


def zeta_density(n: int, q: int) -> Fraction:
    """prod_{i=1}^{n+1} (1 - q^{-i}), the limiting proportion of smooth forms."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    q = _prime_power(q)
    out = Fraction(1)
    for i in range(1, n + 2):
        out *= 1 - Fraction(1, q**i)
    return out


def zeta_value(n: int, q: int) -> Fraction:
    """zeta_{P^n}(n+1) itself, the reciprocal of :func:`zeta_density`."""
    return 1 / zeta_density(n, q)


def moduli_dimension(n: int, d: int) -> int:
    """D = binom(d+n, n) - (n+1)^2 + 1."""
    _check_nd(n, d)
    return comb(d + n, n) - (n + 1) ** 2 + 1


def moduli_estimate(n: int, d: int, q: int) -> tuple[int, int]:
    """(D, q^D - q^{D-1}).

    Raises:
        ValueError: Outside n >= 2, d >= 3.
    """
    if n < 2 or d < 3:
        raise ValueError(f"the moduli estimate needs n >= 2 and d >= 3, got n={n}, d={d}")
    q = _prime_power(q)
    dim = moduli_dimension(n, d)
    return dim, q**dim - q ** (dim - 1)


@dataclass(frozen=True)
class DeltaWindow:
    """The open interval (log_q(d)/n - 2, 1 + log_q(d)/n).

    Attributes:
        low: Lower end; a Fraction when log_q(d) is rational, else a float.
        high: Upper end, same type as low.
        exact: Whether the ends are exact rationals.
    """

    low: Fraction | float
    high: Fraction | float
    exact: bool

    def contains(self, delta: Fraction | float) -> bool:
        return self.low < delta < self.high

    def to_dict(self) -> dict[str, Any]:
        if self.exact:
            return {"low": exact(self.low), "high": exact(self.high), "exact": True}
        return {"low": self.low, "high": self.high, "exact": False}


def log_base(value: int, q: int) -> Fraction | float:
    """log_q(value), as a Fraction whenever it is rational."""
    base, power = perfect_power(q) or (q, 1)
    exponent, is_exact = integer_log(value, base)
    if is_exact:
        return Fraction(int(exponent), int(power))
    return math.log(value) / math.log(q)


def bk_delta_window(n: int, d: int, q: int) -> DeltaWindow:
    """Admissible delta range for the Bertini error term at (n, d, q).

    Raises:
        ValueError: If d < 2.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 2:
        raise ValueError(f"the delta window needs d >= 2, got {d}")
    log = log_base(d, _prime_power(q))
    if isinstance(log, Fraction):
        ratio = log / n
        return DeltaWindow(ratio - 2, 1 + ratio, True)
    return DeltaWindow(log / n - 2, 1 + log / n, False)


def bk_error_scale(n: int, d: int, q: int) -> float:
    """q^{-d / max(n+1, p)}, the second Bertini error term without its constant."""
    p, k = parse_prime_power(q)
    return float((p**k) ** (-d / max(n + 1, p)))


def identity_check(n: int, d: int) -> tuple[bool, bool]:
    """Both summation identities behind the diagonal bound, evaluated exactly.

    sum_{k=0}^{d} binom(k+n-2, n-2) = binom(d+n-1, n-1) and
    sum_{k=0}^{d} (k+n-1) binom(k+n-2, n-2) = (n-1) binom(d+n, n).

    Raises:
        ValueError: If n < 2.
    """
    if n < 2:
        raise ValueError(f"the identities need n >= 2, got {n}")
    first = sum(comb(k + n - 2, n - 2) for k in range(d + 1)) == comb(d + n - 1, n - 1)
    second = sum((k + n - 1) * comb(k + n - 2, n - 2) for k in range(d + 1)) == (n - 1) * comb(d + n, n)
    return first, second


@dataclass(frozen=True)
class BoundReport:
    """Every closed-form quantity for one (n, d, q)."""

    n: int
    d: int
    q: int
    space_dim: int
    thm5_bound: int
    lemma6_threshold: int
    lemma7_bound: Fraction
    lemma7_asymptotic: Fraction
    C: Fraction
    thm2_exponent: Fraction
    thm12_proof_exponent: int
    zeta_limit: Fraction
    zeta_value: Fraction
    moduli_dim: int | None
    moduli_leading: tuple[int, int] | None
    moduli_estimate: int | None
    bk_delta_window: DeltaWindow | None
    bk_error_scale: float
    identities: tuple[bool, bool] | None
    exceptional: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "q": self.q,
            "space_dim": self.space_dim,
            "thm5_bound": self.thm5_bound,
            "lemma6_threshold": self.lemma6_threshold,
            "lemma7_bound": exact(self.lemma7_bound),
            "lemma7_asymptotic": exact(self.lemma7_asymptotic),
            "C": exact(self.C),
            "thm2_exponent": exact(self.thm2_exponent),
            "thm12_proof_exponent": self.thm12_proof_exponent,
            "zeta_limit": exact(self.zeta_limit),
            "zeta_value": exact(self.zeta_value),
            "moduli_dim": self.moduli_dim,
            "moduli_leading": None if self.moduli_leading is None else [str(v) for v in self.moduli_leading],
            "moduli_estimate": None if self.moduli_estimate is None else str(self.moduli_estimate),
            "bk_delta_window": None if self.bk_delta_window is None else self.bk_delta_window.to_dict(),
            "bk_error_scale": self.bk_error_scale,
            "identities": None if self.identities is None else list(self.identities),
            "exceptional": self.exceptional,
        }


def bound_report(n: int, d: int, q: int) -> BoundReport:
    """Evaluate every bound at (n, d, q); quantities outside their range are None."""
    _check_nd(n, d)
    q = _prime_power(q)
    moduli = moduli_estimate(n, d, q) if n >= 2 and d >= 3 else None
    return BoundReport(
        n=n,
        d=d,
        q=q,
        space_dim=space_dim(n, d),
        thm5_bound=thm5_bound(n, d),
        lemma6_threshold=lemma6_threshold(n, d),
        lemma7_bound=lemma7_bound(n, d),
        lemma7_asymptotic=lemma7_asymptotic(n, d),
        C=density_constant(n),
        thm2_exponent=thm2_exponent(n, d),
        thm12_proof_exponent=proof_exponent(n, d),
        zeta_limit=zeta_density(n, q),
        zeta_value=zeta_value(n, q),
        moduli_dim=None if moduli is None else moduli[0],
        moduli_leading=None if moduli is None else (q ** moduli[0], q ** (moduli[0] - 1)),
        moduli_estimate=None if moduli is None else moduli[1],
        bk_delta_window=bk_delta_window(n, d, q) if d >= 2 else None,
        bk_error_scale=bk_error_scale(n, d, q),
        identities=identity_check(n, d) if n >= 2 else None,
        exceptional=(n, d) in EXCEPTIONAL_PAIRS,
    )


__all__ = [
    "BoundReport",
    "DeltaWindow",
    "bk_delta_window",
    "bk_error_scale",
    "below_power",
    "bound_report",
    "density_constant",
    "identity_check",
    "lemma6_threshold",
    "lemma7_asymptotic",
    "lemma7_bound",
    "log_base",
    "moduli_dimension",
    "moduli_estimate",
    "proof_exponent",
    "space_dim",
    "thm2_exponent",
    "thm5_bound",
    "zeta_density",
    "zeta_value",
]
