"""Canonical heights of rational points and the small-height tests built
on them.

The height of an exact point is the sum, over every place that can
possibly contribute, of the forward and backward escape rates at that
place.  Finite places are handled exactly (rational multiples of log p)
whenever the p-adic machinery resolves; the archimedean place carries a
certified numeric error.  A point is periodic precisely when its height
vanishes, which turns the height into a periodicity test: compare
against a threshold eps that must sit strictly above the accumulated
error, otherwise the verdict is refused.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .core import HenonMap, Point2
from .green import green
from .padic import PadicGreenValue, PlaceId, padic_green, relevant_places
from .rationals import format_rational

__all__ = [
    "PlaceContribution",
    "HeightValue",
    "HeightCache",
    "canonical_height",
    "is_periodic_by_height",
    "pair_small_height",
    "rational_box",
    "small_height_points",
    "northcott_box",
]


@dataclass(frozen=True)
class PlaceContribution:
    """One place's share of the height, split into the two directions.

    At an exact finite place ``plus_multiple``/``minus_multiple`` hold
    the bit-exact values in log-p units and ``plus``/``minus`` are their
    float images; at the archimedean place the multiples are absent.
    """

    place: PlaceId
    plus: float
    minus: float
    error: float
    exact: bool
    plus_multiple: Fraction | None = None
    minus_multiple: Fraction | None = None

    def __post_init__(self):
        if self.plus < 0 or self.minus < 0:
            raise ValueError("place contributions are nonnegative")
        if self.error < 0:
            raise ValueError("error must be nonnegative")

    @property
    def total(self) -> float:
        return self.plus + self.minus


@dataclass(frozen=True)
class HeightValue:
    h_plus: float
    h_minus: float
    error: float
    contributions: tuple[PlaceContribution, ...]

    @property
    def total(self) -> float:
        return self.h_plus + self.h_minus

    @property
    def per_place(self) -> dict[PlaceId, float]:
        return {c.place: c.total for c in self.contributions}

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.contributions)


def _finite_contribution(gp: PadicGreenValue, gm: PadicGreenValue) -> PlaceContribution:
    # Inexact directions enter through the lower end of their bracket,
    # with the full bracket width charged to the error.
    err = gp.bracket_width + gm.bracket_width
    return PlaceContribution(
        place=PlaceId(gp.prime),
        plus=gp.value,
        minus=gm.value,
        error=err,
        exact=gp.exact and gm.exact,
        plus_multiple=gp.multiple if gp.exact else None,
        minus_multiple=gm.multiple if gm.exact else None,
    )


def canonical_height(
    f: HenonMap,
    q: Point2,
    tol: float = 1e-8,
    n_max: int = 2048,
    cache: "HeightCache | None" = None,
) -> HeightValue:
    """Global height of an exact point: sum of both escape rates over
    all contributing places, finite places first in ascending order.

    Each archimedean direction is resolved to within tol, so the total
    error is at most 2*tol plus the widths of any unresolved finite
    brackets.  Never drops a place: a finite place that fails to resolve
    exactly still contributes its bracket.
    """
    if not q.is_exact:
        raise TypeError("canonical heights are defined for exact rational points")
    if tol <= 0:
        raise ValueError("tol must be positive")
    key = None
    if cache is not None:
        key = cache.key_for(f, q, tol, n_max)
        hit = cache.get(key)
        if hit is not None:
            return hit

    contribs: list[PlaceContribution] = []
    for place in relevant_places(f, q):
        if place.is_arch:
            gp = green(f, q, "plus", tol=tol, n_max=n_max)
            gm = green(f, q, "minus", tol=tol, n_max=n_max)
            contribs.append(
                PlaceContribution(
                    place=place,
                    plus=gp.value,
                    minus=gm.value,
                    error=gp.error + gm.error,
                    exact=False,
                )
            )
        else:
            gp = padic_green(f, q, place.prime, "plus", n_max=n_max)
            gm = padic_green(f, q, place.prime, "minus", n_max=n_max)
            contribs.append(_finite_contribution(gp, gm))

    h_plus = 0.0
    h_minus = 0.0
    error = 0.0
    for c in contribs:
        h_plus += c.plus
        h_minus += c.minus
        error += c.error
    value = HeightValue(h_plus, h_minus, error, tuple(contribs))
    if cache is not None:
        cache.put(key, value)
    return value


def is_periodic_by_height(
    f: HenonMap,
    q: Point2,
    eps: float = 1e-6,
    tol: float = 1e-8,
    n_max: int = 2048,
    cache: "HeightCache | None" = None,
) -> bool:
    """Numeric periodicity test: height <= eps.

    Sound only when eps clears the accumulated error, so that case
    raises instead of guessing.
    """
    hv = canonical_height(f, q, tol=tol, n_max=n_max, cache=cache)
    if eps <= hv.error:
        raise ValueError(
            f"threshold {eps} is not above the height error {hv.error}; "
            "verdict would be meaningless"
        )
    return hv.total <= eps


def pair_small_height(
    f: HenonMap,
    g: HenonMap,
    q: Point2,
    eps: float = 1e-6,
    tol: float = 1e-8,
    n_max: int = 2048,
    cache: "HeightCache | None" = None,
) -> tuple[bool, float]:
    """Whether the two heights of q sum to at most eps, plus the sum.

    This is the membership test for the small-height locus of a pair of
    maps, specialized to a single rational point.
    """
    hf = canonical_height(f, q, tol=tol, n_max=n_max, cache=cache)
    hg = canonical_height(g, q, tol=tol, n_max=n_max, cache=cache)
    err = hf.error + hg.error
    if eps <= err:
        raise ValueError(
            f"threshold {eps} is not above the combined height error {err}"
        )
    value = hf.total + hg.total
    return value <= eps, value


# ---------------------------------------------------------------------------
# on-disk cache


def _point_key(q: Point2) -> str:
    return f"{format_rational(q.x)},{format_rational(q.y)}"


def _frac_or_none(s):
    return None if s is None else str(s)


class HeightCache:
    """Append-only JSONL store of height values.

    Keys bind the map (canonical hash), the point, and the resolution
    parameters; floats round-trip through hex so a hit reproduces the
    computed value bit for bit.  Appends are single write() calls of one
    line, which keeps concurrent writers from interleaving within a
    record; duplicate lines are harmless (last one wins on load).
    """

    def __init__(self, path: str):
        self.path = path
        self._entries: dict[str, HeightValue] = {}
        self._load()

    @staticmethod
    def key_for(f: HenonMap, q: Point2, tol: float, n_max: int) -> str:
        return f"{f.canonical_hash()}|{_point_key(q)}|{float(tol).hex()}|{n_max}"

    def _load(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    self._entries[rec["key"]] = _decode_height(rec["value"])
                except (KeyError, ValueError, TypeError):
                    continue  # torn or stale line; recomputation will replace it

    def get(self, key: str) -> HeightValue | None:
        return self._entries.get(key)

    def put(self, key: str, value: HeightValue) -> None:
        if key in self._entries:
            return
        self._entries[key] = value
        rec = {"key": key, "value": _encode_height(value)}
        line = json.dumps(rec, sort_keys=True) + "\n"
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)


def _encode_height(hv: HeightValue) -> dict:
    return {
        "h_plus": hv.h_plus.hex(),
        "h_minus": hv.h_minus.hex(),
        "error": hv.error.hex(),
        "places": [
            {
                "place": str(c.place),
                "plus": c.plus.hex(),
                "minus": c.minus.hex(),
                "error": c.error.hex(),
                "exact": c.exact,
                "plus_multiple": _frac_or_none(c.plus_multiple),
                "minus_multiple": _frac_or_none(c.minus_multiple),
            }
            for c in hv.contributions
        ],
    }


def _decode_height(rec: dict) -> HeightValue:
    contribs = []
    for c in rec["places"]:
        place = PlaceId(None) if c["place"] == "inf" else PlaceId(int(c["place"]))
        pm = c.get("plus_multiple")
        mm = c.get("minus_multiple")
        contribs.append(
            PlaceContribution(
                place=place,
                plus=float.fromhex(c["plus"]),
                minus=float.fromhex(c["minus"]),
                error=float.fromhex(c["error"]),
                exact=bool(c["exact"]),
                plus_multiple=None if pm is None else Fraction(pm),
                minus_multiple=None if mm is None else Fraction(mm),
            )
        )
    return HeightValue(
        h_plus=float.fromhex(rec["h_plus"]),
        h_minus=float.fromhex(rec["h_minus"]),
        error=float.fromhex(rec["error"]),
        contributions=tuple(contribs),
    )


# ---------------------------------------------------------------------------
# box scans


def rational_box(bound: int) -> Iterator[Fraction]:
    """All reduced fractions a/b with |a| <= bound and 1 <= b <= bound,
    in ascending order."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    seen = set()
    for den in range(1, bound + 1):
        for num in range(-bound, bound + 1):
            seen.add(Fraction(num, den))
    yield from sorted(seen)


def _odd_prime_lower_bound(f: HenonMap, q: Point2, eps: float, n_max: int) -> float:
    # Exact escape rates at the odd primes of the denominators; these
    # close in a handful of steps and usually decide the point alone.
    d = q.x.denominator * q.y.denominator
    while d % 2 == 0:  # the dyadic place is deferred to a later stage
        d //= 2
    acc = 0.0
    p = 3
    while p * p <= d:
        if d % p == 0:
            while d % p == 0:
                d //= p
            acc += _exact_place_total(f, q, p, n_max)
            if acc > eps:
                return acc
        p += 2
    if d > 1:  # leftover odd prime factor
        acc += _exact_place_total(f, q, d, n_max)
    return acc


def _exact_place_total(f: HenonMap, q: Point2, p: int, n_max: int) -> float:
    gp = padic_green(f, q, p, "plus", n_max=n_max)
    gm = padic_green(f, q, p, "minus", n_max=n_max)
    # Lower ends of brackets only; exact values are their own lower end.
    return gp.value + gm.value


def small_height_points(
    f: HenonMap,
    points: Iterable[Point2],
    eps: float = 1e-4,
    tol: float = 1e-8,
    n_max: int = 2048,
    cache: "HeightCache | None" = None,
) -> list[Point2]:
    """Filter a stream of exact points down to those of height <= eps.

    Cheap certified lower bounds run first (odd-prime exact rates, then
    the archimedean kernel, then dyadic exact rates); only survivors pay
    for a full height.  The cheap stages only ever discard points whose
    lower bound already exceeds eps, so the result equals a brute-force
    filter.
    """
    out: list[Point2] = []
    for q in points:
        if not q.is_exact:
            raise TypeError("box scans take exact rational points")
        acc = _odd_prime_lower_bound(f, q, eps, n_max)
        if acc > eps:
            continue
        gp = green(f, q, "plus", tol=tol, n_max=n_max)
        acc += max(0.0, gp.value - gp.error)
        if acc > eps:
            continue
        gm = green(f, q, "minus", tol=tol, n_max=n_max)
        acc += max(0.0, gm.value - gm.error)
        if acc > eps:
            continue
        dens = q.x.denominator * q.y.denominator
        if dens % 2 == 0:
            acc += _exact_place_total(f, q, 2, n_max)
            if acc > eps:
                continue
        hv = canonical_height(f, q, tol=tol, n_max=n_max, cache=cache)
        if hv.total <= eps:
            out.append(q)
    return out


def northcott_box(
    f: HenonMap,
    bound: int = 20,
    eps: float = 1e-4,
    tol: float = 1e-8,
    n_max: int = 2048,
    cache: "HeightCache | None" = None,
) -> list[Point2]:
    """Every rational point in the height-bound box whose height is at
    most eps, sorted by coordinates.

    For eps below the smallest positive height occurring in the box this
    is exactly the set of periodic rational points in the box.
    """
    coords = list(rational_box(bound))
    pts = (Point2(x, y) for x in coords for y in coords)
    found = small_height_points(f, pts, eps=eps, tol=tol, n_max=n_max, cache=cache)
    return sorted(found, key=lambda q: (q.x, q.y))
