"""Exact p-adic escape-rate (Green) functions and contributing places.

At a finite place everything is ultrametric: once the orbit is deep
enough in the polar region (valuation of y below a structural
threshold), each elementary factor satisfies

    v(p(y) - delta*x) = d * v(y) + v(lead)

exactly, the valuation recursion v_{n+1} = λ v_n + B closes in integer
arithmetic, and the limit is an exact rational multiple of log p:

    G = λ^{-n0} * (-v_{n0} - B/(λ-1)) * log p,
    B = Σ_k (Π_{j>k} d_j) * v(lead_k).

The threshold combines, per factor, the largest v(y) making every
lower-order term and the delta-term strictly smaller than the leading
one AND making v(y) strictly decrease (so the regime is
self-sustaining), with the blanket bound min(0, coefficient/delta
valuations) - 1. The closed form is only emitted after the exact
d-fold growth has been observed on two further full map applications.

Everything is exact Fraction arithmetic; no floating p-adics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log

import sympy

from .core import HenonMap, Point2
from .rationals import VAL_INF, val_p


@dataclass(frozen=True)
class PlaceId:
    """A place of Q: a prime, or the archimedean place (prime=None).

    Ordering: finite places ascending by prime, archimedean last.
    """

    prime: int | None = None

    def __post_init__(self):
        if self.prime is not None:
            p = int(self.prime)
            if p < 2 or not sympy.isprime(p):
                raise ValueError(f"{p} is not prime")
            object.__setattr__(self, "prime", p)

    @staticmethod
    def arch() -> "PlaceId":
        return PlaceId(None)

    @staticmethod
    def finite(p: int) -> "PlaceId":
        return PlaceId(p)

    @property
    def is_arch(self) -> bool:
        return self.prime is None

    def sort_key(self) -> tuple[int, int]:
        return (1, 0) if self.prime is None else (0, self.prime)

    def __lt__(self, other):
        if not isinstance(other, PlaceId):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "inf" if self.prime is None else str(self.prime)


@dataclass(frozen=True)
class PadicGreenValue:
    """Value (multiple * log p) with exactness flag.

    exact=True: multiple is the bit-exact rational value in log-p units.
    exact=False: the truth lies in [multiple, upper] (log-p units); the
    orbit resolved neither to the polar regime nor to a visible repeat
    within the iteration and size caps.
    """

    prime: int
    direction: str
    multiple: Fraction
    exact: bool
    upper: Fraction | None = None
    n_used: int = 0

    def __post_init__(self):
        if self.multiple < 0:
            raise ValueError("p-adic escape rates are nonnegative")
        if not self.exact and self.upper is None:
            raise ValueError("inexact values need an upper bracket")
        if self.upper is not None and self.upper < self.multiple:
            raise ValueError("bracket is inverted")

    @property
    def value(self) -> float:
        return float(self.multiple) * log(self.prime)

    @property
    def value_upper(self) -> float:
        m = self.multiple if self.upper is None else self.upper
        return float(m) * log(self.prime)

    @property
    def bracket_width(self) -> float:
        return 0.0 if self.exact else self.value_upper - self.value


def _factor_valuations(factors, p: int):
    """Per-factor: (degree, [v(c_j)], v(lead), v(delta))."""
    data = []
    for a in factors:
        vals = [val_p(c, p) for c in a.poly.coeffs]
        data.append((a.poly.degree, vals, vals[-1], val_p(a.delta, p)))
    return data


def _threshold(fac_vals) -> int:
    """Largest integer T such that v(y) <= min(v(x), T) launches the
    self-sustaining polar regime for every factor."""

    def ceil_div(a, b):
        return -((-a) // b)

    t = -1
    blanket = 0
    for d, vals, vlead, vdelta in fac_vals:
        for j in range(d):
            if vals[j] != VAL_INF:
                t = min(t, ceil_div(vals[j] - vlead, d - j) - 1)
                blanket = min(blanket, vals[j])
        t = min(t, ceil_div(vdelta - vlead, d - 1) - 1)
        t = min(t, (-vlead - 1) // (d - 1))
        blanket = min(blanket, vlead, vdelta)
    return min(t, blanket - 1)


def _lam_and_b(fac_vals) -> tuple[int, int]:
    lam = 1
    for d, *_ in fac_vals:
        lam *= d
    b = 0
    w = lam
    for d, _vals, vlead, _vd in fac_vals:
        w //= d
        b += w * vlead
    return lam, b


def _tail_constant(fac_vals) -> int:
    """C with log_p+ ||F z|| <= λ log_p+ ||z|| + C (log-p units)."""
    lam, _ = _lam_and_b(fac_vals)
    c = 0
    w = lam
    for d, vals, _vl, vdelta in fac_vals:
        w //= d
        worst = min([v for v in vals if v != VAL_INF] + [vdelta])
        c += w * max(0, -worst)
    return c


def _good_reduction(fac_vals) -> bool:
    for _d, vals, _vl, vdelta in fac_vals:
        if vdelta != 0:
            return False
        if any(v != VAL_INF and v < 0 for v in vals):
            return False
    return True


def _resolve_exact(f: HenonMap, direction: str):
    """Core factor tuple (no swap conjugation) + whether to swap inputs."""
    if direction not in ("plus", "minus"):
        raise ValueError(f"direction must be 'plus' or 'minus', got {direction!r}")
    h = f if direction == "plus" else f.inverse()
    return h.factors, h.transposed


def padic_green(
    f: HenonMap,
    q: Point2,
    p: int,
    direction: str = "plus",
    n_max: int = 2048,
    bit_cap: int = 120_000,
) -> PadicGreenValue:
    """Exact p-adic escape rate of a rational point.

    Resolution order: good-reduction shortcut (exact 0), exact orbit
    repeat (exact 0), polar-regime closed form (exact), else an honest
    [0, upper] bracket once the iteration or size cap is hit.
    """
    if not q.is_exact:
        raise ValueError("p-adic escape rates need exact rational points")
    if p < 2 or not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    factors, swap = _resolve_exact(f, direction)
    x, y = (q.y, q.x) if swap else (q.x, q.y)
    fac_vals = _factor_valuations(factors, p)

    if (
        _good_reduction(fac_vals)
        and val_p(x, p) >= 0
        and val_p(y, p) >= 0
    ):
        return PadicGreenValue(p, direction, Fraction(0), True, n_used=0)

    lam, b = _lam_and_b(fac_vals)
    thr = _threshold(fac_vals)
    c_tail = _tail_constant(fac_vals)

    def apply_map_checked(x, y):
        """One full map application; returns (x, y, regime_held)."""
        held = True
        for a in factors:
            vy = val_p(y, p)
            d = a.poly.degree
            ny = a.poly(y) - a.delta * x
            if vy == VAL_INF or val_p(ny, p) != d * vy + val_p(a.poly.coeffs[-1], p):
                held = False
            x, y = y, ny
        return x, y, held

    seen = {}
    n = 0
    while True:
        vx, vy = val_p(x, p), val_p(y, p)
        if vy != VAL_INF and vy <= thr and vy <= vx:
            # candidate regime entry; confirm exact d-fold growth twice
            cx, cy = x, y
            ok = True
            for _ in range(2):
                cx, cy, held = apply_map_checked(cx, cy)
                if not held:
                    ok = False
                    break
            if ok:
                multiple = (Fraction(-vy) - Fraction(b, lam - 1)) * Fraction(
                    1, lam**n
                )
                return PadicGreenValue(p, direction, multiple, True, n_used=n)
        bits = (
            x.numerator.bit_length()
            + x.denominator.bit_length()
            + y.numerator.bit_length()
            + y.denominator.bit_length()
        )
        if bits <= 512:
            key = (x, y)
            if key in seen:
                return PadicGreenValue(p, direction, Fraction(0), True, n_used=n)
            if len(seen) < 4096:
                seen[key] = n
        if n >= n_max or bits > bit_cap:
            mv = min(vx, vy)
            height_now = 0 if mv == VAL_INF or mv >= 0 else -int(mv)
            upper = (Fraction(height_now) + Fraction(c_tail, lam - 1)) * Fraction(
                1, lam**n
            )
            return PadicGreenValue(
                p, direction, Fraction(0), False, upper=upper, n_used=n
            )
        x, y, _ = apply_map_checked(x, y)
        n += 1


def padic_green_total(
    f: HenonMap, q: Point2, p: int, n_max: int = 2048, bit_cap: int = 120_000
) -> tuple[PadicGreenValue, PadicGreenValue]:
    return (
        padic_green(f, q, p, "plus", n_max, bit_cap),
        padic_green(f, q, p, "minus", n_max, bit_cap),
    )


def _prime_factors_of(n: int) -> set[int]:
    n = abs(n)
    if n <= 1:
        return set()
    return set(sympy.primefactors(n))


def relevant_places(f: HenonMap, q: Point2) -> tuple[PlaceId, ...]:
    """The archimedean place plus every prime dividing any numerator or
    denominator among: the coordinates of q, every factor coefficient,
    every delta. Outside this set the good-reduction shortcut gives 0.

    Conservative by construction; ordered finite-ascending, archimedean
    last (the deterministic summation order for heights).
    """
    if not q.is_exact:
        raise ValueError("needs an exact rational point")
    primes: set[int] = set()

    def eat(r: Fraction):
        primes.update(_prime_factors_of(r.numerator))
        primes.update(_prime_factors_of(r.denominator))

    eat(q.x)
    eat(q.y)
    for a in f.factors:
        for c in a.poly.coeffs:
            eat(c)
        eat(a.delta)
    return tuple(
        [PlaceId.finite(p) for p in sorted(primes)] + [PlaceId.arch()]
    )
