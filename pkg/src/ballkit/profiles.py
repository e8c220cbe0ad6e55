"""Benchmark and test data.

``uniform``
    random ``p``-bit midpoints in [1/2, 1) with random signs and radii
    around one ulp.
``decreasing_magnitude``
    terms ``(1/i!) * pi**-i``; each factor is a ``p``-bit dyadic
    approximation carrying a one-ulp radius.
``pascal``
    matrix entries ``pi * binomial(i + j, i)`` at ``p`` bits, one-ulp radii.
``complex_uniform``
    real and imaginary parts drawn like ``uniform``.

Transcendental inputs are rounded to dyadics first, so kernels and oracles
see the same numbers.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb, factorial
from typing import List, Tuple

import mpmath

from .matmul import BallMatrix, ComplexBallMatrix
from .numbers import ApFloat, Ball, ComplexBall, Mag, round_man_exp

PROFILES = ("uniform", "decreasing_magnitude", "pascal", "complex_uniform")


def _ulp_ball(mid: ApFloat, p: int) -> Ball:
    return Ball(mid, Mag.from_int_exp(1, mid.exp - p))


def _mpf_to_apfloat(x, p: int) -> ApFloat:
    man, exp = x.man_exp
    sign = 1 if man < 0 else 0
    return round_man_exp(sign, abs(man), exp, p)[0]


def pi_apfloat(p: int, extra: int = 0) -> ApFloat:
    """``pi`` truncated to ``p + extra`` bits."""
    with mpmath.workprec(p + extra + 32):
        return _mpf_to_apfloat(+mpmath.pi, p + extra)


def uniform_ball(rng: random.Random, p: int) -> Ball:
    m = rng.getrandbits(p - 1) | (1 << (p - 1))
    mid = ApFloat.from_man_exp(rng.getrandbits(1), m, -p)
    return Ball(mid, Mag.from_int_exp(rng.getrandbits(30) | 1, -p - 30))


def uniform_vector(n: int, p: int, rng: random.Random) -> List[Ball]:
    return [uniform_ball(rng, p) for _ in range(n)]


def uniform_matrix(rows: int, cols: int, p: int, rng: random.Random) -> BallMatrix:
    return BallMatrix(rows, cols, uniform_vector(rows * cols, p, rng))


def complex_uniform_vector(n: int, p: int, rng: random.Random) -> List[ComplexBall]:
    return [ComplexBall(uniform_ball(rng, p), uniform_ball(rng, p)) for _ in range(n)]


def complex_uniform_matrix(rows: int, cols: int, p: int,
                           rng: random.Random) -> ComplexBallMatrix:
    return ComplexBallMatrix(uniform_matrix(rows, cols, p, rng),
                             uniform_matrix(rows, cols, p, rng))


def decreasing_terms(n: int, p: int) -> Tuple[List[Ball], List[Ball]]:
    """``x_i = 1/i!`` and ``y_i = pi**-i`` for ``i < n``, as ``p``-bit balls."""
    xs = [_ulp_ball(ApFloat.from_fraction(Fraction(1, factorial(i)), p), p)
          for i in range(n)]
    ys = []
    with mpmath.workprec(p + 64):
        inv = 1 / mpmath.pi
        t = mpmath.mpf(1)
        for i in range(n):
            ys.append(_ulp_ball(_mpf_to_apfloat(t, p), p))
            t *= inv
    return xs, ys


def pascal_matrix(n: int, p: int) -> BallMatrix:
    """``n x n`` matrix of ``pi * C(i + j, i)`` rounded to ``p`` bits."""
    s, m, k = pi_apfloat(p, 64).man_exp()
    out = []
    for i in range(n):
        for j in range(n):
            mid = round_man_exp(0, m * comb(i + j, i), k, p)[0]
            out.append(_ulp_ball(mid, p))
    return BallMatrix(n, n, out)


def dot_inputs(profile: str, n: int, p: int, rng: random.Random):
    """Vectors ``(x, y)`` for a dot product benchmark."""
    if profile == "uniform":
        return uniform_vector(n, p, rng), uniform_vector(n, p, rng)
    if profile == "decreasing_magnitude":
        return decreasing_terms(n, p)
    if profile == "complex_uniform":
        return complex_uniform_vector(n, p, rng), complex_uniform_vector(n, p, rng)
    if profile == "pascal":
        a = pascal_matrix(n, p)
        return a.row(n - 1), a.col(0)
    raise ValueError("unknown profile %r" % profile)


def matrix_inputs(profile: str, n: int, p: int, rng: random.Random):
    """Square matrices ``(A, B)``; complex for ``complex_uniform``."""
    if profile == "uniform":
        return uniform_matrix(n, n, p, rng), uniform_matrix(n, n, p, rng)
    if profile == "pascal":
        a = pascal_matrix(n, p)
        return a, a
    if profile == "complex_uniform":
        return complex_uniform_matrix(n, n, p, rng), complex_uniform_matrix(n, n, p, rng)
    if profile == "decreasing_magnitude":
        xs, ys = decreasing_terms(n, p)
        a = BallMatrix(n, n, [xs[(i + j) % n] for i in range(n) for j in range(n)])
        b = BallMatrix(n, n, [ys[(i + j) % n] for i in range(n) for j in range(n)])
        return a, b
    raise ValueError("unknown profile %r" % profile)
