"""Exact univariate and bivariate polynomials over the rationals.

`UniPoly` is the workhorse: factor polynomials p_i(y), parameter
families c(t), and polynomial curve coordinates all use it. `BiPoly`
exists for symbolic expansion of composed maps (equality tests and the
resultant route); expansion degree is capped by the caller, so BiPoly
never needs to be clever about size.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .rationals import Rational, format_rational


class DegreeCapExceeded(Exception):
    """Symbolic expansion passed a configured total-degree cap."""


def _as_rational(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected exact rational coefficient, got {type(c).__name__}")


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial, coefficients ascending (coeffs[k] multiplies X^k).

    Trailing zero coefficients are stripped; the zero polynomial has an
    empty coefficient tuple and degree -1.
    """

    coeffs: tuple[Rational, ...]

    def __init__(self, coeffs):
        cs = [_as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, x):
        """Horner evaluation; works for Fraction, float, complex, BiPoly,
        UniPoly (composition) — anything with * and + against Fraction."""
        if not self.coeffs:
            return 0 * x
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return UniPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return UniPoly([c * other for c in self.coeffs])
        if not isinstance(other, UniPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return UniPoly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def derivative(self) -> "UniPoly":
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = format_rational(c) if k == 0 else (
                f"{format_rational(c)}*X^{k}" if k > 1 else f"{format_rational(c)}*X")
            parts.append(term)
        return " + ".join(parts)


def rational_roots(poly: UniPoly) -> list[Fraction]:
    """All rational roots of a nonzero UniPoly, ascending, without multiplicity.

    Clears denominators and runs the rational root theorem: candidates
    ±r/s with r | a_0 and s | a_d (after stripping the X^v factor).
    """
    if poly.is_zero:
        raise ValueError("zero polynomial has every root")
    cs = list(poly.coeffs)
    roots = []
    # strip powers of X: root 0
    v = 0
    while cs[v] == 0:
        v += 1
    if v:
        roots.append(Fraction(0))
        cs = cs[v:]
    if len(cs) == 1:
        return sorted(roots)
    # integerize
    den_lcm = 1
    for c in cs:
        den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
    ints = [int(c * den_lcm) for c in cs]
    a0, ad = abs(ints[0]), abs(ints[-1])

    def divisors(n: int) -> list[int]:
        ds = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                ds.append(d)
                ds.append(n // d)
            d += 1
        return ds

    seen = set()
    for r in divisors(a0):
        for s in divisors(ad):
            for cand in (Fraction(r, s), Fraction(-r, s)):
                if cand in seen:
                    continue
                seen.add(cand)
                if poly(cand) == 0:
                    roots.append(cand)
    return sorted(set(roots))


class BiPoly:
    """Bivariate polynomial over the rationals, sparse {(i, j): coeff} with
    i the X-exponent and j the Y-exponent. Immutable by convention."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        for k, c in (terms or {}).items():
            c = _as_rational(c)
            if c != 0:
                t[(int(k[0]), int(k[1]))] = c
        self.terms = t

    @staticmethod
    def var_x() -> "BiPoly":
        return BiPoly({(1, 0): 1})

    @staticmethod
    def var_y() -> "BiPoly":
        return BiPoly({(0, 1): 1})

    @staticmethod
    def const(c) -> "BiPoly":
        return BiPoly({(0, 0): c})

    @property
    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(i + j for i, j in self.terms)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiPoly.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BiPoly({k: c * other for k, c in self.terms.items()})
        if not isinstance(other, BiPoly):
            return NotImplemented
        out = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def swap_vars(self) -> "BiPoly":
        """Exchange the roles of X and Y."""
        return BiPoly({(j, i): c for (i, j), c in self.terms.items()})

    def evaluate(self, x, y):
        acc = 0 * x
        for (i, j), c in sorted(self.terms.items()):
            acc = acc + c * x**i * y**j
        return acc

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items()):
            mono = "".join(s for s in (f"x^{i}" if i else "", f"y^{j}" if j else "") if s)
            parts.append(f"{format_rational(c)}{'*' + mono if mono else ''}")
        return " + ".join(parts)
