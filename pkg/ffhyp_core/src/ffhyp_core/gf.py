"""Exact arithmetic in F_p and F_{p^k}.

Elements are stored as integer indices: the element with polynomial-basis
coordinates (c_0, ..., c_{k-1}) over the modulus has index sum(c_i * p**i).
Index 0 is zero and index 1 is one in every field. Scalar operations work on
Python ints; the ``v*`` operations and ``matmul`` work on numpy integer arrays
of indices and are what the census inner loops use.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint, isprime

from ffhyp_core.config import BudgetConfig, BudgetExceededError

logger = logging.getLogger(__name__)

FieldElem = int


# ---------------------------------------------------------------------------
# Polynomials over F_p (coefficient lists, low degree first)
# ---------------------------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a modulo b over F_p (b nonzero, any leading coefficient)."""
    r = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv_lead = pow(b[-1], -1, p)
    while len(r) >= len(b):
        factor = r[-1] * inv_lead % p
        shift = len(r) - len(b)
        for i, c in enumerate(b):
            r[shift + i] = (r[shift + i] - factor * c) % p
        _trim(r)
    return r


def _poly_mulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_rem(prod, modulus, p)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division against every monic polynomial of degree 1..deg/2.

    Args:
        poly: Monic polynomial, coefficients low degree first.
        p: Prime characteristic.

    Returns:
        True if poly is irreducible over F_p.
    """
    k = len(poly) - 1
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not _poly_rem(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k (low degree compared first)."""
    for low in itertools.product(range(p), repeat=k):
        candidate = list(low) + [1]
        if is_irreducible(candidate, p):
            return tuple(candidate)
    raise ValueError(f"no irreducible polynomial of degree {k} over F_{p}")  # unreachable


# ---------------------------------------------------------------------------
# Field
# ---------------------------------------------------------------------------

class GaloisField:
    """The finite field F_q, q = p^k, with a fixed modulus and generator.

    Instances are immutable after construction and safe to share between
    workers; build them with :func:`make_field`.

    Attributes:
        p: Prime characteristic.
        k: Extension degree.
        q: Cardinality p**k.
        modulus: Monic irreducible of degree k, coefficients low degree first.
        generator: Index of the fixed multiplicative generator.
    """

    def __init__(self, p: int, k: int, modulus: tuple[int, ...], use_tables: bool):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._powers = np.array([p**i for i in range(k)], dtype=np.int64)
        # x^(k+t) reduced to coordinates, t = 0..k-2; drives digit-convolution products
        self._reduction = np.zeros((max(k - 1, 0), k), dtype=np.int64)
        for t in range(k - 1):
            mono = [0] * (k + t) + [1]
            red = _poly_rem(mono, modulus, p)
            self._reduction[t, : len(red)] = red
        self._exp: np.ndarray | None = None
        self._log: np.ndarray | None = None
        self.generator = self._find_generator()
        if use_tables:
            self._build_tables()

    # -- construction helpers -------------------------------------------------

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        order = self.q - 1
        cofactors = [order // r for r in factorint(order)]
        for a in sorted(range(1, self.q), key=self.to_coeffs):
            if all(self._slow_pow(a, c) != 1 for c in cofactors):
                return a
        raise ValueError(f"no generator found for F_{self.q}")  # unreachable

    def _build_tables(self) -> None:
        order = self.q - 1
        exp = np.empty(2 * order, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, self.generator)
        exp[order:] = exp[:order]
        self._exp, self._log = exp, log
        logger.debug("Built log/antilog tables for F_%d", self.q)

    def _slow_mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        prod = _poly_mulmod(self.to_coeffs(a), self.to_coeffs(b), self.modulus, self.p)
        return self.from_coeffs(prod)

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return result

    # -- conversions ------------------------------------------------------------

    @property
    def has_tables(self) -> bool:
        return self._exp is not None

    def to_coeffs(self, a: int) -> tuple[int, ...]:
        """Polynomial-basis coordinates of a, low degree first (length k)."""
        return tuple((a // p_i) % self.p for p_i in (self.p**i for i in range(self.k)))

    def from_coeffs(self, coeffs: Iterable[int]) -> int:
        """Index of the element with the given coordinates (reduced mod p)."""
        total = 0
        for i, c in enumerate(coeffs):
            if i >= self.k:
                if c % self.p:
                    raise ValueError(f"coordinate vector longer than k = {self.k}")
                continue
            total += (c % self.p) * self.p**i
        return total

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def units(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element index of F_{self.q}")
        return a

    # -- scalar arithmetic ----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return sum(((x + y) % self.p) * int(w) for x, y, w in zip(self.to_coeffs(a), self.to_coeffs(b), self._powers))

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return sum((-x % self.p) * int(w) for x, w in zip(self.to_coeffs(a), self._powers))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return int(self._exp[self._log[a] + self._log[b]])
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inversion of zero in a finite field")
        if self._log is not None:
            return int(self._exp[(-self._log[a]) % (self.q - 1)])
        return self._slow_pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        """a**e; negative exponents are allowed on units."""
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if self._log is not None:
            return int(self._exp[(self._log[a] * e) % (self.q - 1)])
        return self._slow_pow(a, e % (self.q - 1))

    def discrete_log(self, a: int) -> int:
        """The unique e in [0, q-2] with generator**e = a.

        Raises:
            ZeroDivisionError: If a is zero.
        """
        if a == 0:
            raise ZeroDivisionError("discrete log of zero")
        if self._log is not None:
            return int(self._log[a])
        # baby-step giant-step above the table limit
        order = self.q - 1
        m = int(np.ceil(np.sqrt(order)))
        baby: dict[int, int] = {}
        x = 1
        for j in range(m):
            baby.setdefault(x, j)
            x = self._slow_mul(x, self.generator)
        giant = self._slow_pow(self.inv(self.generator), m)
        y = a
        for i in range(m + 1):
            if y in baby:
                return (i * m + baby[y]) % order
            y = self._slow_mul(y, giant)
        raise ValueError(f"discrete log of {a} not found")  # unreachable for a unit

    def order(self, a: int) -> int:
        """Multiplicative order of a unit."""
        log = self.discrete_log(a)
        return (self.q - 1) // math.gcd(log, self.q - 1)

    # -- vectorised arithmetic ------------------------------------------------

    def _digits(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.int64)[..., None] // self._powers) % self.p

    def _combine(self, digits: np.ndarray) -> np.ndarray:
        return (digits % self.p) @ self._powers

    def _fold(self, conv: list[np.ndarray]) -> np.ndarray:
        """Reduce convolution coefficients c_0..c_{2k-2} (stacked last) modulo the modulus."""
        out = [c % self.p for c in conv[: self.k]]
        for t, c in enumerate(conv[self.k :]):
            c = c % self.p
            for s in range(self.k):
                coeff = int(self._reduction[t, s])
                if coeff:
                    out[s] = (out[s] + coeff * c) % self.p
        return self._combine(np.stack(out, axis=-1))

    def vadd(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(x, dtype=np.int64) + y) % self.p
        return self._combine(self._digits(x) + self._digits(y))

    def vneg(self, x: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (-np.asarray(x, dtype=np.int64)) % self.p
        return self._combine(-self._digits(x))

    def vsub(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(x, dtype=np.int64) - y) % self.p
        return self._combine(self._digits(x) - self._digits(y))

    def vmul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if self.k == 1:
            return (x * y) % self.p
        if self._log is not None:
            x, y = np.broadcast_arrays(x, y)
            zero = (x == 0) | (y == 0)
            out = self._exp[self._log[x] + self._log[y]]
            return np.where(zero, 0, out)
        dx, dy = self._digits(x), self._digits(y)
        conv = [sum(dx[..., i] * dy[..., t - i] for i in range(max(0, t - self.k + 1), min(t, self.k - 1) + 1))
                for t in range(2 * self.k - 1)]
        return self._fold(conv)

    def vscale(self, c: int, x: np.ndarray) -> np.ndarray:
        return self.vmul(np.int64(c), x)

    def vinv(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if np.any(x == 0):
            raise ZeroDivisionError("inversion of zero in a finite field")
        if self._log is not None:
            return self._exp[(-self._log[x]) % (self.q - 1)]
        return self.vpow(x, self.q - 2)

    def vpow(self, x: np.ndarray, e: int) -> np.ndarray:
        """Elementwise x**e for a nonnegative integer exponent (0**0 = 1)."""
        x = np.asarray(x, dtype=np.int64)
        if e == 0:
            return np.ones_like(x)
        if self._log is not None:
            return np.where(x == 0, 0, self._exp[(self._log[x] * e) % (self.q - 1)])
        result = np.ones_like(x)
        base = x
        while e:
            if e & 1:
                result = self.vmul(result, base)
            base = self.vmul(base, base)
            e >>= 1
        return result

    def vsum(self, x: np.ndarray, axis: int = -1) -> np.ndarray:
        """Field sum along an axis."""
        if self.k == 1:
            return np.asarray(x, dtype=np.int64).sum(axis=axis) % self.p
        return self._combine(self._digits(x).sum(axis=axis if axis >= 0 else axis - 1))

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product over F_q on the last two axes (numpy broadcasting rules)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return np.matmul(a, b) % self.p
        da, db = self._digits(a), self._digits(b)
        conv = []
        for t in range(2 * self.k - 1):
            acc = None
            for i in range(max(0, t - self.k + 1), min(t, self.k - 1) + 1):
                term = np.matmul(da[..., i], db[..., t - i])
                acc = term if acc is None else acc + term
            conv.append(acc % self.p)
        return self._fold(conv)

    # -- extensions -------------------------------------------------------------

    def embedding_into(self, big: "GaloisField") -> np.ndarray:
        """Index map F_q -> big for a field big = F_{q^r} of the same characteristic.

        The image of the class of x is the smallest root (element order) of the
        modulus in big.
        """
        if big.p != self.p or big.k % self.k:
            raise ValueError(f"F_{big.q} does not contain F_{self.q}")
        if self.k == 1:
            return np.arange(self.p, dtype=np.int64)
        for beta in sorted(range(1, big.q), key=big.to_coeffs):
            value = 0
            for c in reversed(self.modulus):
                value = big.add(big.mul(value, beta), c)
            if value == 0:
                break
        else:
            raise ValueError("modulus has no root in the extension")  # unreachable
        beta_powers = [big.pow(beta, i) for i in range(self.k)]
        images = np.zeros(self.q, dtype=np.int64)
        for a in range(self.q):
            value = 0
            for c, bp in zip(self.to_coeffs(a), beta_powers):
                value = big.add(value, big.mul(c, bp))
            images[a] = value
        return images

    def __repr__(self) -> str:
        return f"GaloisField(p={self.p}, k={self.k}, modulus={self.modulus}, generator={self.generator})"

    def __reduce__(self):
        return (_rebuild_field, (self.p, self.k, self.has_tables))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GaloisField) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self) -> int:
        return hash((self.p, self.k))


FieldSpec = GaloisField


@functools.lru_cache(maxsize=64)
def _cached_field(p: int, k: int, use_tables: bool) -> GaloisField:
    field = GaloisField(p, k, smallest_irreducible(p, k), use_tables)
    logger.info("Constructed %r (tables=%s)", field, use_tables)
    return field


def _rebuild_field(p: int, k: int, use_tables: bool) -> GaloisField:
    return _cached_field(p, k, use_tables)


def make_field(p: int, k: int = 1, budgets: BudgetConfig | None = None) -> GaloisField:
    """Construct F_{p^k} with deterministic modulus and generator.

    Args:
        p: Prime characteristic.
        k: Extension degree >= 1.
        budgets: Size guards (defaults when None).

    Returns:
        The (cached) GaloisField.

    Raises:
        ValueError: If p is not prime or k < 1.
        BudgetExceededError: If p**k exceeds budgets.max_field_size.
    """
    budgets = budgets or BudgetConfig()
    if not isinstance(p, (int, np.integer)) or not isprime(int(p)):
        raise ValueError(f"field characteristic must be prime, got {p!r}")
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"extension degree must be >= 1, got {k!r}")
    q = int(p) ** int(k)
    budgets.check(f"field size q = {p}^{k}", q, "max_field_size")
    return _cached_field(int(p), int(k), q <= budgets.table_field_size)


def parse_prime_power(q: int | str) -> tuple[int, int]:
    """Split q (an int or 'p^k') into (p, k).

    Raises:
        ValueError: If q is not a prime power.
    """
    if isinstance(q, str) and "^" in q:
        base, exp = q.split("^", 1)
        p, k = int(base), int(exp)
        if not isprime(p) or k < 1:
            raise ValueError(f"not a prime power: {q}")
        return p, k
    value = int(q)
    if value < 2:
        raise ValueError(f"not a prime power: {q}")
    factors = factorint(value)
    if len(factors) != 1:
        raise ValueError(f"not a prime power: {q}")
    (p, k), = factors.items()
    return int(p), int(k)


def field_for_order(q: int | str, budgets: BudgetConfig | None = None) -> GaloisField:
    """make_field from a prime power q."""
    p, k = parse_prime_power(q)
    return make_field(p, k, budgets)


__all__ = [
    "BudgetExceededError",
    "FieldElem",
    "FieldSpec",
    "GaloisField",
    "field_for_order",
    "is_irreducible",
    "make_field",
    "parse_prime_power",
    "smallest_irreducible",
]
