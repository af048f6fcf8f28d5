"""
Dyadic approximations of rationals and square roots
===================================================

Every approximation at precision n is a fraction m / 2**n within 2**-n of
the target.  Rounding is to nearest, so the actual error is at most half that.
"""

from fractions import Fraction

from tmlab import approx_rational, approx_sqrt

for n in (4, 8, 16, 32):
    third = approx_rational(1, 3, n)
    root = approx_sqrt(2, n)
    err = abs(third.to_fraction() - Fraction(1, 3))
    print(f"n={n:2}  1/3 ~ {third.to_binary():36}  error {float(err):.2e}")
    print(f"      sqrt 2 ~ {root.to_decimal()}")

# Exact inputs come back unchanged.
print(approx_sqrt(Fraction(9, 16), 10), approx_rational(1, 2, 8))
