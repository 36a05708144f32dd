"""Plane polynomial automorphisms in composed normal form.

A map here is a composition of elementary factors

    (x, y) |-> (y, p(y) - delta*x),   deg p >= 2,  delta != 0,

optionally conjugated by the coordinate swap sigma(x, y) = (y, x). The
swap conjugation is what makes inverses closed under the normal form:
the inverse of an elementary factor is sigma ∘ (x, y) |-> (y, p(y)/delta
- x/delta) ∘ sigma, so the inverse of a composition is again a
composition of elementary factors, swap-conjugated, with the factor
order reversed. Forward and backward dynamics therefore share one code
path.

Exact points carry Fraction coordinates; numeric points carry complex
doubles and overflow to an explicit escaped-to-infinity sentinel rather
than silently producing NaN.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

from .poly import BiPoly, DegreeCapExceeded, UniPoly
from .rationals import Rational, format_rational, parse_rational

#: Magnitude beyond which numeric evaluation reports escape to infinity.
OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class Point2:
    """Affine plane point: both coordinates Fraction (exact) or complex."""

    x: object
    y: object

    @staticmethod
    def exact(x, y) -> "Point2":
        return Point2(parse_rational(x), parse_rational(y))

    @staticmethod
    def numeric(x, y) -> "Point2":
        return Point2(complex(x), complex(y))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.x, Fraction)

    @property
    def escaped(self) -> bool:
        """Numeric sentinel: coordinate overflowed past representable range."""
        if self.is_exact:
            return False
        return not (_finite(self.x) and _finite(self.y))

    def to_numeric(self) -> "Point2":
        if self.is_exact:
            return Point2(complex(self.x), complex(self.y))
        return self

    def swap(self) -> "Point2":
        return Point2(self.y, self.x)

    def __str__(self):
        if self.is_exact:
            return f"({format_rational(self.x)}, {format_rational(self.y)})"
        return f"({self.x}, {self.y})"


def _finite(z: complex) -> bool:
    return abs(z.real) <= OVERFLOW_LIMIT and abs(z.imag) <= OVERFLOW_LIMIT


#: Returned by numeric evaluation once any coordinate overflows.
ESCAPED_POINT = Point2(complex(float("inf"), 0.0), complex(float("inf"), 0.0))


@dataclass(frozen=True)
class ElementaryHenon:
    """One factor (x, y) |-> (y, p(y) - delta*x)."""

    poly: UniPoly
    delta: Rational

    def __post_init__(self):
        if self.poly.degree < 2:
            raise ValueError(f"factor degree must be >= 2, got {self.poly.degree}")
        if self.delta == 0:
            raise ValueError("factor delta must be nonzero")

    def inverse_core(self) -> "ElementaryHenon":
        """The elementary factor b with factor^{-1} = sigma ∘ b ∘ sigma."""
        inv = Fraction(1) / self.delta
        return ElementaryHenon(self.poly * inv, inv)


@dataclass(frozen=True)
class HenonMap:
    """Composition of elementary factors, optionally swap-conjugated.

    factors[0] is applied first. With transposed=True the map is
    sigma ∘ (composition) ∘ sigma.
    """

    factors: tuple[ElementaryHenon, ...]
    transposed: bool = False

    def __post_init__(self):
        if not self.factors:
            raise ValueError("need at least one elementary factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dynamical_degree(self) -> int:
        """Degree growth rate of iterates: product of factor degrees."""
        d = 1
        for a in self.factors:
            d *= a.poly.degree
        return d

    @property
    def jacobian(self) -> Rational:
        """Constant Jacobian determinant: product of factor deltas."""
        j = Fraction(1)
        for a in self.factors:
            j *= a.delta
        return j

    def inverse(self) -> "HenonMap":
        return HenonMap(
            tuple(a.inverse_core() for a in reversed(self.factors)),
            transposed=not self.transposed,
        )

    # -- evaluation ---------------------------------------------------

    def evaluate(self, q: Point2, n: int = 1) -> Point2:
        """Apply the map n times (negative n applies the inverse)."""
        if n < 0:
            return self.inverse().evaluate(q, -n)
        f = self
        for _ in range(n):
            q = f._apply_once(q)
        return q

    def _apply_once(self, q: Point2) -> Point2:
        if q.is_exact:
            x, y = q.x, q.y
            if self.transposed:
                x, y = y, x
            for a in self.factors:
                x, y = y, a.poly(y) - a.delta * x
            if self.transposed:
                x, y = y, x
            return Point2(x, y)
        return self._apply_once_numeric(q)

    def _apply_once_numeric(self, q: Point2) -> Point2:
        if q.escaped:
            return ESCAPED_POINT
        x, y = q.x, q.y
        if self.transposed:
            x, y = y, x
        for a in self.factors:
            coeffs = [complex(c) for c in a.poly.coeffs]
            acc = coeffs[-1]
            for c in reversed(coeffs[:-1]):
                acc = acc * y + c
            x, y = y, acc - complex(a.delta) * x
            if not (_finite(x) and _finite(y)):
                return ESCAPED_POINT
        if self.transposed:
            x, y = y, x
        return Point2(x, y)

    def orbit(self, q: Point2, n: int):
        """Points q, f(q), ..., f^n(q) (inverse iterates for n < 0)."""
        step = self if n >= 0 else self.inverse()
        out = [q]
        for _ in range(abs(n)):
            q = step._apply_once(q)
            out.append(q)
        return out

    # -- differentials ------------------------------------------------

    def differential(self, q: Point2):
        """2x2 Jacobian matrix of the map at q, rows (dX, dY).

        Exact points give Fraction entries, numeric points complex.
        """
        x, y = q.x, q.y
        exact = q.is_exact
        one = Fraction(1) if exact else complex(1)
        zero = Fraction(0) if exact else complex(0)
        m = [[one, zero], [zero, one]]  # accumulated differential
        if self.transposed:
            x, y = y, x
            m = [[m[1][0], m[1][1]], [m[0][0], m[0][1]]]
        for a in self.factors:
            dp = a.poly.derivative()
            pv = dp(y) if exact else _horner_c(dp, y)
            d = a.delta if exact else complex(a.delta)
            # factor differential [[0, 1], [-d, pv]]
            r0 = [m[1][0], m[1][1]]
            r1 = [pv * m[1][0] - d * m[0][0], pv * m[1][1] - d * m[0][1]]
            m = [r0, r1]
            x, y = y, (a.poly(y) - a.delta * x) if exact else (_horner_c(a.poly, y) - complex(a.delta) * x)
        if self.transposed:
            m = [[m[1][0], m[1][1]], [m[0][0], m[0][1]]]
        return m

    # -- symbolic -----------------------------------------------------

    def expand(self, degree_cap: int | None = None) -> tuple[BiPoly, BiPoly]:
        """Expanded coordinate polynomials (A, B) with map(x,y) = (A, B).

        Raises DegreeCapExceeded if a partial expansion passes degree_cap
        (default 2 * dynamical_degree).
        """
        cap = 2 * self.dynamical_degree if degree_cap is None else degree_cap
        a_poly, b_poly = _expand_factors(self.factors, cap)
        if self.transposed:
            a_poly, b_poly = b_poly.swap_vars(), a_poly.swap_vars()
        return a_poly, b_poly

    # -- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "factors": [
                {
                    "poly": [format_rational(c) for c in a.poly.coeffs],
                    "delta": format_rational(a.delta),
                }
                for a in self.factors
            ]
        }
        if self.transposed:
            d["transposed"] = True
        return d

    def canonical_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_numeric(self) -> "NumericHenon":
        return NumericHenon(
            tuple(
                NumericFactor(tuple(complex(c) for c in a.poly.coeffs), complex(a.delta))
                for a in self.factors
            ),
            transposed=self.transposed,
        )

    def __str__(self):
        core = " ∘ ".join(
            f"(y, {a.poly.__str__().replace('X', 'y')} - {format_rational(a.delta)}*x)"
            for a in reversed(self.factors)
        )
        return f"swap∘[{core}]∘swap" if self.transposed else core


def _horner_c(poly: UniPoly, y: complex) -> complex:
    if poly.is_zero:
        return complex(0)
    acc = complex(poly.coeffs[-1])
    for c in reversed(poly.coeffs[:-1]):
        acc = acc * y + complex(c)
    return acc


def _expand_factors(factors, cap: int) -> tuple[BiPoly, BiPoly]:
    a_poly, b_poly = BiPoly.var_x(), BiPoly.var_y()
    for fac in factors:
        a_poly, b_poly = b_poly, fac.poly(b_poly) - fac.delta * a_poly
        if b_poly.total_degree > cap:
            raise DegreeCapExceeded(
                f"expansion degree {b_poly.total_degree} exceeds cap {cap}"
            )
    return a_poly, b_poly


@dataclass(frozen=True)
class NumericFactor:
    """Elementary factor with complex-double data (family specializations
    at non-rational parameters, measure-side work)."""

    coeffs: tuple[complex, ...]  # ascending, len = degree + 1
    delta: complex

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class NumericHenon:
    """Complex-coefficient counterpart of HenonMap (numeric evaluation only)."""

    factors: tuple[NumericFactor, ...]
    transposed: bool = False

    @property
    def dynamical_degree(self) -> int:
        d = 1
        for a in self.factors:
            d *= a.degree
        return d

    @property
    def jacobian(self) -> complex:
        j = complex(1)
        for a in self.factors:
            j *= a.delta
        return j

    def inverse(self) -> "NumericHenon":
        return NumericHenon(
            tuple(
                NumericFactor(tuple(c / a.delta for c in a.coeffs), 1 / a.delta)
                for a in reversed(self.factors)
            ),
            transposed=not self.transposed,
        )

    def evaluate(self, q: Point2, n: int = 1) -> Point2:
        if n < 0:
            return self.inverse().evaluate(q, -n)
        for _ in range(n):
            q = self._apply_once(q)
        return q

    def _apply_once(self, q: Point2) -> Point2:
        q = q.to_numeric()
        if q.escaped:
            return ESCAPED_POINT
        x, y = q.x, q.y
        if self.transposed:
            x, y = y, x
        for a in self.factors:
            acc = a.coeffs[-1]
            for c in reversed(a.coeffs[:-1]):
                acc = acc * y + c
            x, y = y, acc - a.delta * x
            if not (_finite(x) and _finite(y)):
                return ESCAPED_POINT
        if self.transposed:
            x, y = y, x
        return Point2(x, y)

    def to_numeric(self) -> "NumericHenon":
        return self


def as_numeric_map(f) -> NumericHenon:
    """Accept HenonMap or NumericHenon; return the numeric form."""
    return f.to_numeric()


def compose(f: HenonMap, g: HenonMap) -> HenonMap:
    """(f ∘ g): apply g first. Both maps must share the swap flag."""
    if f.transposed != g.transposed:
        raise ValueError("cannot compose maps with different swap conjugation")
    return HenonMap(g.factors + f.factors, transposed=f.transposed)


def iterate_map(f: HenonMap, n: int) -> HenonMap:
    """The n-th iterate as a map in normal form (n >= 1)."""
    if n < 1:
        raise ValueError("iterate count must be >= 1")
    return HenonMap(f.factors * n, transposed=f.transposed)


def equal_symbolic(f: HenonMap, g: HenonMap, degree_cap: int | None = None) -> bool:
    """Exact equality of the two maps as plane automorphisms."""
    if f.dynamical_degree != g.dynamical_degree:
        return False
    cap = degree_cap if degree_cap is not None else 2 * f.dynamical_degree
    return f.expand(cap) == g.expand(cap)


def common_iterate_detect(
    f: HenonMap, g: HenonMap, n_max: int = 4, m_max: int = 4
) -> tuple[int, int] | None:
    """Smallest (N, M) in lexicographic order with f^N = g^M, or None.

    Degree growth gives a cheap pruning: f^N = g^M forces
    dynamical_degree(f)^N = dynamical_degree(g)^M.
    """
    lam_f, lam_g = f.dynamical_degree, g.dynamical_degree
    exp_f: dict[int, tuple[BiPoly, BiPoly]] = {}
    exp_g: dict[int, tuple[BiPoly, BiPoly]] = {}

    def expansion(cache, h, n):
        if n not in cache:
            cache[n] = iterate_map(h, n).expand(2 * h.dynamical_degree**n)
        return cache[n]

    for n in range(1, n_max + 1):
        for m in range(1, m_max + 1):
            if lam_f**n != lam_g**m:
                continue
            if f.jacobian**n != g.jacobian**m:
                continue
            if expansion(exp_f, f, n) == expansion(exp_g, g, m):
                return (n, m)
    return None
