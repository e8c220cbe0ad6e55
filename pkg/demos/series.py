"""Truncated polynomial products and the exponential of a power series.

Run: python3 demos/series.py
"""

from fractions import Fraction

from ballkit.numbers import BALL_ZERO, Ball
from ballkit.oracle import (apfloat_to_fraction, ball_contains, mag_to_fraction,
                           rational_exp_series)
from ballkit.poly import poly_mullow_classical, series_exp_basecase

# (1 + x)^2 truncated to 3 terms
one_plus_x = [Ball.exact(1), Ball.exact(1)]
print("(1+x)^2:", [apfloat_to_fraction(c.mid) for c in
                   poly_mullow_classical(one_plus_x, one_plus_x, 3, 64)])

# exp(x) gives 1/k!
coeffs = series_exp_basecase([BALL_ZERO, Ball.exact(1)], 8, 128)
for k, c in enumerate(coeffs):
    print("  x^%d: %.12g  radius %.2e" % (k, float(apfloat_to_fraction(c.mid)), float(mag_to_fraction(c.rad))))

# exp(x + x^2/2 ... ) checked against exact rational arithmetic
a = [BALL_ZERO, Ball.exact(1), Ball.exact(0.5), Ball.exact(-0.25)]
got = series_exp_basecase(a, 10, 128)
want = rational_exp_series([Fraction(0), Fraction(1), Fraction(1, 2), Fraction(-1, 4)], 10)
print("all coefficients contained:", all(ball_contains(g, w) for g, w in zip(got, want)))
