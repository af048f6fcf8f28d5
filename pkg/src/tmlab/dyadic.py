"""Exact dyadic rationals ``m * 2**-n`` and precision-n approximations.

Every value is stored in canonical form: the mantissa is odd, or the
precision is zero.  Ring operations are exact; rounding only happens in
:func:`round_to_precision` and the ``approx_*`` procedures, which round to
nearest with ties going to the even mantissa.
"""

from __future__ import annotations

import functools
import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "Dyadic",
    "ComplexDyadic",
    "ilog2",
    "round_to_precision",
    "round_fraction",
    "approx_rational",
    "approx_sqrt",
    "parse_dyadic",
]


def _normalize(m: int, n: int) -> tuple[int, int]:
    if m == 0:
        return 0, 0
    if n <= 0:
        return m << -n, 0
    tz = (m & -m).bit_length() - 1
    shift = min(tz, n)
    return m >> shift, n - shift


class Dyadic:
    """The dyadic rational ``mantissa / 2**precision``."""

    __slots__ = ("mantissa", "precision")

    def __init__(self, mantissa: int = 0, precision: int = 0):
        if not isinstance(mantissa, int) or not isinstance(precision, int):
            raise TypeError("mantissa and precision must be integers")
        m, n = _normalize(mantissa, precision)
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "precision", n)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def from_value(cls, x) -> "Dyadic":
        """Exact conversion from an int, Fraction or Dyadic; raises if not dyadic."""
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, Rational):
            q = x.denominator
            if q & (q - 1):
                raise ValueError(f"{x} is not a dyadic rational")
            return cls(x.numerator, q.bit_length() - 1)
        raise TypeError(f"cannot convert {type(x).__name__} to Dyadic")

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.precision)

    def in_precision(self, n: int) -> bool:
        """Membership in D_n, i.e. ``self * 2**n`` is an integer."""
        return self.precision <= n

    def scaled(self, n: int) -> int:
        """The integer ``self * 2**n``; requires membership in D_n."""
        if self.precision > n:
            raise ValueError(f"{self} is not in D_{n}")
        return self.mantissa << (n - self.precision)

    def bit_length(self) -> int:
        return self.mantissa.bit_length()

    def _coerce(self, other):
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(self.precision, other.precision)
        return Dyadic(self.scaled(n) + other.scaled(n), n)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.mantissa * other.mantissa, self.precision + other.precision)

    __rmul__ = __mul__

    def __abs__(self):
        return Dyadic(abs(self.mantissa), self.precision)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.precision == other.precision
        if isinstance(other, (int, Rational)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def _cmp_key(self, other):
        if isinstance(other, Dyadic):
            n = max(self.precision, other.precision)
            return self.scaled(n), other.scaled(n)
        if isinstance(other, (int, Rational)):
            return self.to_fraction(), Fraction(other)
        return None

    def __lt__(self, other):
        k = self._cmp_key(other)
        return NotImplemented if k is None else k[0] < k[1]

    def __le__(self, other):
        k = self._cmp_key(other)
        return NotImplemented if k is None else k[0] <= k[1]

    def __gt__(self, other):
        k = self._cmp_key(other)
        return NotImplemented if k is None else k[0] > k[1]

    def __ge__(self, other):
        k = self._cmp_key(other)
        return NotImplemented if k is None else k[0] >= k[1]

    def __bool__(self):
        return self.mantissa != 0

    def __repr__(self):
        return f"Dyadic({self.mantissa}, {self.precision})"

    def __str__(self):
        if self.precision == 0:
            return str(self.mantissa)
        return f"{self.mantissa}/2^{self.precision}"

    def to_decimal(self) -> str:
        """Exact decimal expansion (always finite for a dyadic)."""
        m, n = self.mantissa, self.precision
        if n == 0:
            return str(m)
        sign = "-" if m < 0 else ""
        digits = str(abs(m) * 5**n).rjust(n + 1, "0")
        return f"{sign}{digits[:-n]}.{digits[-n:]}"

    def to_binary(self) -> str:
        """Exact binary expansion, e.g. ``0.0101``."""
        m, n = self.mantissa, self.precision
        sign = "-" if m < 0 else ""
        bits = format(abs(m), "b")
        if n == 0:
            return sign + bits
        bits = bits.rjust(n + 1, "0")
        return f"{sign}{bits[:-n]}.{bits[-n:]}"


class ComplexDyadic:
    """A complex number with dyadic real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Dyadic.from_value(re))
        object.__setattr__(self, "im", Dyadic.from_value(im))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexDyadic is immutable")

    def __add__(self, other):
        if not isinstance(other, ComplexDyadic):
            return NotImplemented
        return ComplexDyadic(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        if not isinstance(other, ComplexDyadic):
            return NotImplemented
        return ComplexDyadic(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        if not isinstance(other, ComplexDyadic):
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return ComplexDyadic(a * c - b * d, a * d + b * c)

    def __neg__(self):
        return ComplexDyadic(-self.re, -self.im)

    def conjugate(self):
        return ComplexDyadic(self.re, -self.im)

    def abs2(self) -> Dyadic:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def in_precision(self, n: int) -> bool:
        return self.re.in_precision(n) and self.im.in_precision(n)

    def __eq__(self, other):
        if isinstance(other, ComplexDyadic):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"ComplexDyadic({self.re!r}, {self.im!r})"


def ilog2(k: int) -> int:
    """floor(log2 k) for k >= 1."""
    if k < 1:
        raise ValueError("ilog2 needs k >= 1")
    return k.bit_length() - 1


def _round_div(num: int, den: int) -> int:
    """num/den rounded to nearest integer, ties to even; den > 0."""
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q & 1):
        q += 1
    return q


def round_fraction(x, n: int) -> Dyadic:
    """Nearest element of D_n to the rational x (ties to even mantissa)."""
    if n < 0:
        raise ValueError("precision must be non-negative")
    x = Fraction(x)
    return Dyadic(_round_div(x.numerator << n, x.denominator), n)


def round_to_precision(d: Dyadic, n: int) -> Dyadic:
    """Nearest element of D_n to d; error at most 2**-(n+1)."""
    if n < 0:
        raise ValueError("precision must be non-negative")
    if d.precision <= n:
        return d
    return Dyadic(_round_div(d.mantissa, 1 << (d.precision - n)), n)


def approx_rational(p: int, q: int, n: int) -> Dyadic:
    """Precision-n approximation of p/q with error at most 2**-(n+1)."""
    if q == 0:
        raise ZeroDivisionError("approx_rational with q = 0")
    if q < 0:
        p, q = -p, -q
    return round_fraction(Fraction(p, q), n)


@functools.lru_cache(maxsize=256)
def _approx_sqrt_cached(x: Fraction, n: int) -> Dyadic:
    a, b = x.numerator << (2 * n), x.denominator
    m = math.isqrt(a // b)
    # m = floor(sqrt(x) * 2**n); compare x * 4**n with (m + 1/2)**2.
    lhs, rhs = 4 * a, (2 * m + 1) ** 2 * b
    if lhs > rhs or (lhs == rhs and m & 1):
        m += 1
    return Dyadic(m, n)


def approx_sqrt(x, n: int) -> Dyadic:
    """Precision-n approximation of sqrt(x) for rational x >= 0.

    Rounds to nearest, so the error is at most 2**-(n+1).
    """
    if n < 0:
        raise ValueError("precision must be non-negative")
    if isinstance(x, Dyadic):
        x = x.to_fraction()
    x = Fraction(x)
    if x < 0:
        raise ValueError("approx_sqrt of a negative number")
    return _approx_sqrt_cached(x, n)


_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")


def parse_dyadic(text: str) -> Dyadic:
    """Parse ``m/2^n``, an integer, or a terminating binary/decimal literal."""
    match = _DYADIC_RE.match(text)
    if match:
        return Dyadic(int(match.group(1)), int(match.group(2)))
    try:
        return Dyadic.from_value(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a dyadic literal: {text!r}") from exc
