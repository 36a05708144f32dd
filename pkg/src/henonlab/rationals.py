"""Exact rational scalars and p-adic valuations.

The exact scalar type throughout the package is `fractions.Fraction`
(always in lowest terms, positive denominator). This module adds the
few number-theoretic helpers the rest of the package needs.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf

Rational = Fraction

#: Valuation of zero.
VAL_INF = inf


def parse_rational(text) -> Fraction:
    """Parse 'num/den' or 'num' (also accepts ints/Fractions)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text.strip())
    raise TypeError(f"cannot parse rational from {type(text).__name__}")


def format_rational(q: Fraction) -> str:
    """Canonical 'num/den' form ('num' when the denominator is 1)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def val_int(n: int, p: int) -> int | float:
    """p-adic valuation of an integer (VAL_INF for 0)."""
    if n == 0:
        return VAL_INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val_p(q: Fraction, p: int) -> int | float:
    """p-adic valuation of a rational (VAL_INF for 0).

    v_p(a/b) = v_p(a) - v_p(b); the fraction is in lowest terms so at
    most one of the two terms is nonzero.
    """
    if q == 0:
        return VAL_INF
    num, den = q.numerator, q.denominator
    if den % p == 0:
        return -val_int(den, p)
    return val_int(num, p)


def rational_reconstruct(t: int, m: int) -> tuple[int, int] | None:
    """Recover a/b with a ≡ t·b (mod m), |a| <= sqrt(m/2), 0 < b <= sqrt(m/2).

    Half-extended Euclid on (m, t). Returns None when no representative
    exists in that box (then t does not come from a small fraction).
    """
    t %= m
    bound_sq = m // 2  # compare squares, avoids float sqrt
    r0, r1 = m, t
    s0, s1 = 0, 1
    while r1 * r1 > bound_sq:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or s1 * s1 > bound_sq:
        return None
    a, b = r1, s1
    if b < 0:
        a, b = -a, -b
    from math import gcd

    if gcd(b, m) != 1 or gcd(abs(a), b) != 1:
        return None
    return a, b
