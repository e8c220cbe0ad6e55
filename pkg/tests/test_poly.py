import random
from fractions import Fraction

import pytest

from ballkit.numbers import ApFloat, Ball, Mag
from ballkit.oracle import (ball_contains, ball_contains_interval,
                            ball_to_interval, rational_convolution,
                            rational_exp_series, RationalInterval)
from ballkit.poly import poly_mullow_classical, series_exp_basecase

from conftest import rand_apfloat, rand_ball

ONE = Ball.exact(1)


def test_square_of_one_plus_x():
    a = [ONE, ONE]
    assert poly_mullow_classical(a, a, 3, 53) == [ONE, Ball.exact(2), ONE]


def test_mullow_lengths():
    a = [ONE, Ball.exact(2)]
    assert poly_mullow_classical(a, a, 0, 53) == []
    assert poly_mullow_classical(a, a, 5, 53)[3:] == [Ball.exact(0)] * 2
    assert poly_mullow_classical([], a, 2, 53) == [Ball.exact(0)] * 2
    with pytest.raises(ValueError):
        poly_mullow_classical(a, a, -1, 53)


def _interval_convolution(a, b, n):
    zero = RationalInterval(Fraction(0), Fraction(0))
    out = []
    for k in range(n):
        acc = zero
        for i in range(k + 1):
            if i < len(a) and k - i < len(b):
                acc = acc + ball_to_interval(a[i]) * ball_to_interval(b[k - i])
        out.append(acc)
    return out


def test_mullow_random_contains(rng):
    for _ in range(200):
        p = rng.choice([20, 53, 128])
        a = [rand_ball(rng, 80) for _ in range(8)]
        b = [rand_ball(rng, 80) for _ in range(rng.randint(1, 8))]
        n = rng.randint(1, 16)
        got = poly_mullow_classical(a, b, n, p)
        for c, iv in zip(got, _interval_convolution(a, b, n)):
            assert ball_contains_interval(c, iv)


def test_mullow_exact_matches_oracle(rng):
    a = [Ball(rand_apfloat(rng, 30)) for _ in range(6)]
    b = [Ball(rand_apfloat(rng, 30)) for _ in range(4)]
    got = poly_mullow_classical(a, b, 9, 300)
    want = rational_convolution(a, b, 9)
    assert all(ball_contains(g, w) and g.rad.kind.name == "ZERO"
               for g, w in zip(got, want))


def test_exp_of_x():
    b = series_exp_basecase([Ball.exact(0), ONE], 5, 64)
    for got, want in zip(b, [1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)]):
        assert ball_contains(got, want)
    assert b[2] == Ball(ApFloat.from_float(0.5))


def test_exp_of_zero():
    assert series_exp_basecase([Ball.exact(0)], 4, 53) == [ONE] + [Ball.exact(0)] * 3
    assert series_exp_basecase([], 3, 53) == [ONE] + [Ball.exact(0)] * 2
    assert series_exp_basecase([Ball.exact(0)], 0, 53) == []


def test_exp_rejects_constant_term():
    with pytest.raises(ValueError):
        series_exp_basecase([ONE, ONE], 4, 53)
    with pytest.raises(ValueError):
        series_exp_basecase([Ball(ApFloat.from_int(0), Mag.from_int_exp(1, -5))], 4, 53)


def test_exp_random_exact_contains(rng):
    for _ in range(100):
        p = rng.choice([53, 128])
        a = [Ball.exact(0)] + [Ball(rand_apfloat(rng, 40, -6, 2)) for _ in range(11)]
        got = series_exp_basecase(a, 12, p)
        for g, w in zip(got, rational_exp_series(a, 12)):
            assert ball_contains(g, w)


def _scaled(iv, k):
    return iv * RationalInterval(Fraction(k), Fraction(k))


def test_exp_derivative_identity(rng):
    # (exp a)' and a' exp a, both enclosed in intervals, must overlap
    n = 10
    for _ in range(30):
        a = [Ball.exact(0)] + [rand_ball(rng, 50, -4, 1, p_zero=0) for _ in range(n - 1)]
        b = series_exp_basecase(a, n, 128)
        da = [_scaled(ball_to_interval(a[j + 1]), j + 1) for j in range(n - 1)]
        for k in range(n - 1):
            lhs = _scaled(ball_to_interval(b[k + 1]), k + 1)
            rhs = RationalInterval(Fraction(0), Fraction(0))
            for j in range(k + 1):
                rhs = rhs + da[j] * ball_to_interval(b[k - j])
            assert lhs.lo <= rhs.hi and rhs.lo <= lhs.hi
