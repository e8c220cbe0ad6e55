"""Polynomial and power series basecases built on the fused dot product.

A polynomial is a plain sequence of balls, index = power.
"""

from __future__ import annotations

from typing import List, Sequence

from .dot import dot_ball
from .numbers import BALL_ONE, BALL_ZERO, ZERO, Ball, ball_div_int, ball_mul_int

BallPoly = List[Ball]


def poly_mullow_classical(a: Sequence[Ball], b: Sequence[Ball], length: int,
                          p: int) -> BallPoly:
    """``a * b mod x**length``; coefficient ``k`` is one dot product.

    ``b`` is walked backwards with a negative stride, so nothing is copied
    or reversed.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    out = []
    for k in range(length):
        lo = max(0, k - len(b) + 1)
        hi = min(k, len(a) - 1)
        if lo > hi:
            out.append(BALL_ZERO)
            continue
        out.append(dot_ball(a, b, p, n=hi - lo + 1, xstart=lo, xstep=1,
                            ystart=k - lo, ystep=-1))
    return out


def series_exp_basecase(a: Sequence[Ball], length: int, p: int) -> BallPoly:
    """``exp(a) mod x**length`` for a series with zero constant term.

    Uses ``b_0 = 1`` and ``k b_k = sum_{j=1..k} (j a_j) b_{k-j}``.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    if a and not (a[0].mid.kind is ZERO and a[0].rad.kind is ZERO):
        raise ValueError("constant term must be exactly zero")
    if length == 0:
        return []
    ja = [ball_mul_int(a[j], j) for j in range(1, min(len(a), length))]
    b = [BALL_ONE]
    for k in range(1, length):
        m = min(k, len(ja))
        if m == 0:
            b.append(BALL_ZERO)
            continue
        s = dot_ball(ja, b, p, n=m, ystart=k - 1, ystep=-1)
        b.append(ball_div_int(s, k, p))
    return b
