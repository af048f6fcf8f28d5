import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmlab.dyadic import (
    ComplexDyadic,
    Dyadic,
    approx_rational,
    approx_sqrt,
    ilog2,
    parse_dyadic,
    round_fraction,
    round_to_precision,
)

mantissas = st.integers(-(10**30), 10**30)
precisions = st.integers(0, 120)
dyadics = st.builds(Dyadic, mantissas, precisions)
rationals = st.fractions(max_denominator=10**12).filter(lambda f: abs(f) < 10**12)


def nearest_ties_even(x: Fraction, n: int) -> Fraction:
    """Reference rounding written against Fraction only."""
    y = x * 2**n
    lo = math.floor(y)
    diff = y - lo
    if diff > Fraction(1, 2) or (diff == Fraction(1, 2) and lo % 2 == 1):
        lo += 1
    return Fraction(lo, 2**n)


@given(mantissas, precisions)
def test_canonical_form(m, n):
    d = Dyadic(m, n)
    assert d.to_fraction() == Fraction(m, 2**n)
    assert d.precision == 0 or d.mantissa % 2 == 1


@given(dyadics, dyadics)
def test_ring_operations_are_exact(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb
    assert (-a).to_fraction() == -fa
    assert (a < b) == (fa < fb)
    assert (a <= b) == (fa <= fb)
    assert (a == b) == (fa == fb)


@given(dyadics, st.integers(-50, 50))
def test_mixed_with_int(a, k):
    assert (a + k).to_fraction() == a.to_fraction() + k
    assert (k - a).to_fraction() == k - a.to_fraction()
    assert (a * k).to_fraction() == a.to_fraction() * k


def test_equal_values_hash_alike():
    assert Dyadic(4, 3) == Dyadic(1, 1)
    assert hash(Dyadic(4, 3)) == hash(Dyadic(1, 1))
    assert Dyadic(3, 0) == 3


def test_immutable():
    d = Dyadic(1, 1)
    with pytest.raises(AttributeError):
        d.mantissa = 3


@given(rationals, st.integers(0, 80))
def test_round_fraction_matches_reference(x, n):
    r = round_fraction(x, n)
    assert r.in_precision(n)
    assert r.to_fraction() == nearest_ties_even(x, n)
    assert abs(r.to_fraction() - x) <= Fraction(1, 2 ** (n + 1))


@given(dyadics, st.integers(0, 80))
def test_round_to_precision_matches_reference(d, n):
    assert round_to_precision(d, n).to_fraction() == nearest_ties_even(d.to_fraction(), n)


def test_ties_go_to_even():
    assert round_fraction(Fraction(1, 8), 2) == Dyadic(0)
    assert round_fraction(Fraction(3, 8), 2) == Dyadic(1, 1)
    assert round_fraction(Fraction(-3, 8), 2) == Dyadic(-1, 1)
    assert round_to_precision(Dyadic(5, 3), 2) == Dyadic(1, 1)


@given(st.integers(-(10**20), 10**20), st.integers(1, 10**20), st.integers(0, 100))
def test_approx_rational_contract(p, q, n):
    r = approx_rational(p, q, n)
    assert r.in_precision(n)
    assert abs(r.to_fraction() - Fraction(p, q)) <= Fraction(1, 2**n)


def test_approx_rational_examples():
    assert approx_rational(1, 3, 4) == Dyadic(5, 4)
    assert approx_rational(1, 2, 8) == Dyadic(1, 1)
    assert approx_rational(-1, -3, 4) == Dyadic(5, 4)
    with pytest.raises(ZeroDivisionError):
        approx_rational(1, 0, 3)
    with pytest.raises(ValueError):
        approx_rational(1, 3, -1)


def within(v: Fraction, x: Fraction, e: Fraction) -> bool:
    """|v - sqrt(x)| <= e, decided with exact arithmetic."""
    upper = (v + e) ** 2 >= x
    lower = v - e <= 0 or (v - e) ** 2 <= x
    return upper and lower


@settings(max_examples=300)
@given(st.fractions(min_value=0, max_value=10**6, max_denominator=10**6), st.integers(0, 90))
def test_approx_sqrt_rounds_to_nearest(x, n):
    r = approx_sqrt(x, n)
    assert r.in_precision(n)
    assert within(r.to_fraction(), x, Fraction(1, 2 ** (n + 1)))


def test_approx_sqrt_exact_squares():
    assert approx_sqrt(Fraction(9, 4), 3) == Dyadic(3, 1)
    assert approx_sqrt(0, 5) == Dyadic(0)
    assert approx_sqrt(Dyadic(1, 2), 4) == Dyadic(1, 1)
    with pytest.raises(ValueError):
        approx_sqrt(-1, 3)


def test_sqrt2_digits():
    getcontext().prec = 60
    r = approx_sqrt(2, 100)
    assert abs(Decimal(r.mantissa) / Decimal(2) ** r.precision - Decimal(2).sqrt()) < Decimal(2) ** -100


def test_ilog2():
    assert [ilog2(k) for k in (1, 2, 3, 4, 1023, 1024)] == [0, 1, 1, 2, 9, 10]
    with pytest.raises(ValueError):
        ilog2(0)


@given(dyadics)
def test_decimal_and_binary_rendering_are_exact(d):
    assert Fraction(d.to_decimal()) == d.to_fraction()
    text = d.to_binary()
    sign = -1 if text.startswith("-") else 1
    whole, _, frac = text.lstrip("-").partition(".")
    value = int(whole, 2) + (Fraction(int(frac, 2), 2 ** len(frac)) if frac else 0)
    assert sign * value == d.to_fraction()


def test_rendering_examples():
    assert Dyadic(5, 4).to_decimal() == "0.3125"
    assert Dyadic(5, 4).to_binary() == "0.0101"
    assert Dyadic(-3, 1).to_decimal() == "-1.5"
    assert Dyadic(-3, 1).to_binary() == "-1.1"
    assert str(Dyadic(5, 4)) == "5/2^4"


@pytest.mark.parametrize(
    "text, value",
    [("5/2^4", Fraction(5, 16)), ("-3/2^1", Fraction(-3, 2)), ("7", Fraction(7)), ("0.375", Fraction(3, 8)), ("12/2^2", Fraction(3))],
)
def test_parse_dyadic(text, value):
    assert parse_dyadic(text).to_fraction() == value


@pytest.mark.parametrize("text", ["1/3", "0.1", "abc", "1/0"])
def test_parse_dyadic_rejects(text):
    with pytest.raises(ValueError):
        parse_dyadic(text)


@given(dyadics, dyadics, dyadics, dyadics)
def test_complex_arithmetic(a, b, c, d):
    z, w = ComplexDyadic(a, b), ComplexDyadic(c, d)
    prod = z * w
    ref_re = a.to_fraction() * c.to_fraction() - b.to_fraction() * d.to_fraction()
    ref_im = a.to_fraction() * d.to_fraction() + b.to_fraction() * c.to_fraction()
    assert (prod.re.to_fraction(), prod.im.to_fraction()) == (ref_re, ref_im)
    assert z.abs2().to_fraction() == a.to_fraction() ** 2 + b.to_fraction() ** 2
    assert (z * z.conjugate()).im == 0
    assert (z - z) == ComplexDyadic()
