from fractions import Fraction

import pytest

from henonlab.rationals import (
    format_rational,
    parse_rational,
    rational_reconstruct,
    val_p,
)


def test_parse_forms():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("7") == Fraction(7)
    assert parse_rational(7) == Fraction(7)
    assert parse_rational(Fraction(2, 6)) == Fraction(1, 3)
    assert parse_rational("1.25") == Fraction(5, 4)
    assert parse_rational(" 2/3 ") == Fraction(2, 3)


def test_parse_rejects():
    for bad in ("", "a/b", "1/0", "1/2/3", None, 1.5):
        with pytest.raises((ValueError, ZeroDivisionError, TypeError)):
            parse_rational(bad)


def test_format_roundtrip():
    for q in (Fraction(3, 4), Fraction(-5), Fraction(0), Fraction(22, 7)):
        assert parse_rational(format_rational(q)) == q
    assert format_rational(Fraction(-5)) == "-5"
    assert format_rational(Fraction(1, 3)) == "1/3"


def test_val_p():
    assert val_p(Fraction(12), 2) == 2
    assert val_p(Fraction(1, 12), 2) == -2
    assert val_p(Fraction(5, 7), 3) == 0
    assert val_p(Fraction(0), 5) == float("inf")


def test_rational_reconstruct_roundtrip():
    m = 10**9 + 7
    for a, b in ((22, 7), (-3, 4), (1, 1), (0, 1)):
        t = (a * pow(b, -1, m)) % m
        assert rational_reconstruct(t, m) == (a, b)


def test_rational_reconstruct_failure():
    # residues with no small-fraction preimage are rejected, not guessed
    m = 101 * 103
    big = 5000  # numerator above the sqrt(m/2) bound
    t = (big * pow(7, -1, m)) % m
    out = rational_reconstruct(t, m)
    if out is not None:
        a, b = out
        assert (a * pow(b, -1, m)) % m == t
