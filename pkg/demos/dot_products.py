"""Fused ball dot products versus a naive multiply-add loop.

Run: python3 demos/dot_products.py
"""

import random
import time
from fractions import Fraction

from ballkit.dot import dot_approx, dot_ball, dot_complex_ball, dot_naive
from ballkit.numbers import Ball, ComplexBall, format_ball
from ballkit.oracle import ball_contains, rational_dot_exact
from ballkit.profiles import decreasing_terms, uniform_vector


def timed(fn, reps=20):
    t0 = time.perf_counter()
    for _ in range(reps):
        out = fn()
    return out, (time.perf_counter() - t0) / reps


rng = random.Random(7)
x, y = uniform_vector(100, 128, rng), uniform_vector(100, 128, rng)

fused, t_fused = timed(lambda: dot_ball(x, y, 128))
naive, t_naive = timed(lambda: dot_naive(x, y, 128))
mid, t_mid = timed(lambda: dot_approx(x, y, 128))
print("uniform N=100 p=128")
print("  fused  ", format_ball(fused), "%.0f us" % (t_fused * 1e6))
print("  naive  ", format_ball(naive), "%.0f us" % (t_naive * 1e6))
print("  approx ", mid, "%.0f us" % (t_mid * 1e6))

# exact products of the midpoints must sit inside the fused ball
exact = rational_dot_exact([b.mid for b in x], [b.mid for b in y])
print("  midpoint product contained:", ball_contains(fused, exact))

# strides: every other entry of x against y read backwards
sub = dot_ball(x, y, 128, n=10, xstart=0, xstep=2, ystart=99, ystep=-1)
print("  strided subset:", format_ball(sub))

# terms of rapidly decreasing size: the kernel drops bits that cannot matter
x, y = decreasing_terms(1000, 1024)
_, t_fused = timed(lambda: dot_ball(x, y, 1024), 3)
_, t_naive = timed(lambda: dot_naive(x, y, 1024), 3)
print("decreasing magnitudes N=1000 p=1024: %.1fx faster than naive" % (t_naive / t_fused))

# complex dot with exact inputs: the three-multiplication path is exact too
cx = [ComplexBall(Ball.exact(k), Ball.exact(-k)) for k in range(1, 6)]
cy = [ComplexBall(Ball.exact(2 * k + 1), Ball.exact(k)) for k in range(1, 6)]
z = dot_complex_ball(cx, cy, 64)
print("complex:", z)
want = sum((complex(k, -k) * complex(2 * k + 1, k) for k in range(1, 6)), 0j)
print("  expected", want, "exact:", z.re.is_exact() and z.im.is_exact())
print("  matches:", ball_contains(z.re, Fraction(int(want.real)))
      and ball_contains(z.im, Fraction(int(want.imag))))
