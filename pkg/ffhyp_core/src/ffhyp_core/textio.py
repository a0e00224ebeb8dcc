"""Text forms for field elements, polynomials and matrices.

Grammar (whitespace is ignored everywhere)::

    element := integer                      prime fields; reduced mod p
             | '[' integer (',' integer)* ']'  extension fields; coordinates
                                            low degree first
    poly    := '0' | term ('+' term)*
    term    := factor ('*' factor)*         at least one variable factor
    factor  := element | 'x' index ['^' exponent]
    matrix  := row (';' row)*
    row     := element (',' element)*

Variables are 1-indexed (x1 .. x{n+1}). Repeated monomials accumulate and every
term must have the same total degree. Integers are accepted in extension
fields as elements of the prime subfield.
"""

from __future__ import annotations

import re

import numpy as np

from ffhyp_core.gf import GaloisField
from ffhyp_core.polyspace import PolyVec, monomial_basis

_VARIABLE = re.compile(r"^x(\d+)(?:\^(\d+))?$")
_INTEGER = re.compile(r"^[+-]?\d+$")


def _split_top(text: str, sep: str) -> list[str]:
    """Split on sep outside square brackets."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced ']' in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth:
        raise ValueError(f"unbalanced '[' in {text!r}")
    parts.append("".join(current))
    return parts


def parse_element(text: str, field: GaloisField) -> int:
    """Parse one field element.

    Raises:
        ValueError: On malformed input or a coordinate vector longer than k.
    """
    token = "".join(text.split())
    if _INTEGER.match(token):
        return field.from_int(int(token))
    if token.startswith("[") and token.endswith("]"):
        body = token[1:-1]
        coords = body.split(",") if body else []
        if not all(_INTEGER.match(c) for c in coords):
            raise ValueError(f"bad field element {text!r}")
        if len(coords) > field.k:
            raise ValueError(f"field element {text!r} has more than k = {field.k} coordinates")
        return field.from_coeffs(int(c) for c in coords)
    raise ValueError(f"bad field element {text!r}")


def format_element(a: int, field: GaloisField) -> str:
    if field.k == 1:
        return str(int(a))
    return "[" + ",".join(str(c) for c in field.to_coeffs(int(a))) + "]"


def parse_poly(text: str, field: GaloisField, n: int | None = None, d: int | None = None) -> PolyVec:
    """Parse a homogeneous polynomial.

    Args:
        text: Polynomial in the grammar above.
        field: Coefficient field.
        n: Projective dimension; inferred from the largest variable index (at least 1) when None.
        d: Degree; inferred from the terms when None (required for the zero polynomial).

    Raises:
        ValueError: On malformed input, inhomogeneous terms, or a variable
            index above n + 1.
    """
    source = "".join(text.split())
    if not source:
        raise ValueError("empty polynomial")
    terms: list[tuple[int, dict[int, int]]] = []
    if source != "0":
        for term in _split_top(source, "+"):
            if not term:
                raise ValueError(f"empty term in {text!r}")
            coeff, powers = 1, {}
            for factor in _split_top(term, "*"):
                match = _VARIABLE.match(factor)
                if match:
                    index = int(match.group(1))
                    exponent = int(match.group(2) or 1)
                    if index < 1 or exponent < 1:
                        raise ValueError(f"bad variable {factor!r}")
                    powers[index] = powers.get(index, 0) + exponent
                else:
                    coeff = field.mul(coeff, parse_element(factor, field))
            if not powers:
                raise ValueError(f"term {term!r} has no variable (degree 0 forms are not supported)")
            terms.append((coeff, powers))

    top = max((max(p) for _, p in terms), default=1)
    if n is None:
        n = max(top - 1, 1)
    elif top > n + 1:
        raise ValueError(f"variable x{top} exceeds n + 1 = {n + 1}")
    degrees = {sum(p.values()) for _, p in terms}
    if len(degrees) > 1:
        raise ValueError(f"polynomial is not homogeneous: degrees {sorted(degrees)}")
    if degrees:
        (found,) = degrees
        if d is not None and d != found:
            raise ValueError(f"polynomial has degree {found}, expected {d}")
        d = found
    if d is None:
        raise ValueError("the degree of the zero polynomial must be given")

    basis = monomial_basis(n, d)
    coeffs = np.zeros(basis.size, dtype=np.int64)
    for coeff, powers in terms:
        exps = tuple(powers.get(i + 1, 0) for i in range(n + 1))
        pos = basis.index(exps)
        coeffs[pos] = field.add(int(coeffs[pos]), coeff)
    return PolyVec(field, basis, coeffs)


def format_poly(f: PolyVec) -> str:
    """Terms in graded-lex order; unit coefficients and exponents 1 are omitted."""
    out = []
    for coeff, exps in zip(f.coeffs, f.basis.exponents):
        if coeff == 0:
            continue
        factors = [] if coeff == 1 else [format_element(int(coeff), f.field)]
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(f"x{i + 1}")
            elif e > 1:
                factors.append(f"x{i + 1}^{e}")
        out.append("*".join(factors))
    return "+".join(out) if out else "0"


def parse_matrix(text: str, field: GaloisField) -> np.ndarray:
    """Parse a square or rectangular matrix; rows must have equal length."""
    source = "".join(text.split())
    rows = [[parse_element(e, field) for e in _split_top(row, ",")] for row in _split_top(source, ";")]
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"matrix rows have different lengths in {text!r}")
    return np.array(rows, dtype=np.int64)


def format_matrix(entries: np.ndarray, field: GaloisField) -> str:
    return ";".join(",".join(format_element(int(a), field) for a in row) for row in np.asarray(entries))


__all__ = [
    "format_element",
    "format_matrix",
    "format_poly",
    "parse_element",
    "parse_matrix",
    "parse_poly",
]
