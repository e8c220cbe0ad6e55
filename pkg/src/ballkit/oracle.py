"""Exact rational reference computations.

Nothing here touches the kernel arithmetic: values are decoded straight from
their fields into :class:`fractions.Fraction` and combined naively.  Meant for
tests and verification runs with modest sizes only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Union

from .numbers import FINITE, ZERO, ApFloat, Ball, Mag

ExactRational = Fraction


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def __add__(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __mul__(self, other: "RationalInterval") -> "RationalInterval":
        c = (self.lo * other.lo, self.lo * other.hi,
             self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(c), max(c))

    def __contains__(self, q) -> bool:
        return self.lo <= q <= self.hi


def _pow2(k: int) -> Fraction:
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def apfloat_to_fraction(x: ApFloat) -> Fraction:
    if x.kind is ZERO:
        return Fraction(0)
    if x.kind is not FINITE:
        raise ValueError("not a finite float")
    v = x.man * _pow2(x.exp - 64 * x.n)
    return -v if x.sign else v


def mag_to_fraction(r: Mag) -> Fraction:
    if r.kind is ZERO:
        return Fraction(0)
    if r.kind is not FINITE:
        raise ValueError("infinite radius")
    return r.b * _pow2(r.f - 30)


def ball_to_interval(b: Ball) -> RationalInterval:
    m = apfloat_to_fraction(b.mid)
    r = mag_to_fraction(b.rad)
    return RationalInterval(m - r, m + r)


def as_fraction(v: Union[ApFloat, Ball, Fraction, int]) -> Fraction:
    if isinstance(v, Ball):
        return apfloat_to_fraction(v.mid)
    if isinstance(v, ApFloat):
        return apfloat_to_fraction(v)
    return Fraction(v)


def ball_contains(b: Ball, q: Fraction) -> bool:
    if b.mid.kind not in (FINITE, ZERO) or not b.rad.is_finite():
        return True
    return abs(q - apfloat_to_fraction(b.mid)) <= mag_to_fraction(b.rad)


def ball_contains_interval(b: Ball, iv: RationalInterval) -> bool:
    return ball_contains(b, iv.lo) and ball_contains(b, iv.hi)


def rational_dot_exact(x: Sequence, y: Sequence) -> Fraction:
    """Exact ``sum(x_i * y_i)`` of the midpoints."""
    if len(x) != len(y):
        raise ValueError("length mismatch")
    return sum((as_fraction(a) * as_fraction(b) for a, b in zip(x, y)),
               Fraction(0))


def interval_dot_hull(x: Sequence[Ball], y: Sequence[Ball]) -> RationalInterval:
    """Exact hull of ``sum([m_i +- r_i] * [m'_i +- r'_i])``."""
    if len(x) != len(y):
        raise ValueError("length mismatch")
    acc = RationalInterval(Fraction(0), Fraction(0))
    for a, b in zip(x, y):
        acc = acc + ball_to_interval(a) * ball_to_interval(b)
    return acc


def _check_dims(a_rows, b_rows):
    inner = len(a_rows[0]) if a_rows else 0
    if inner != len(b_rows):
        raise ValueError("inner dimensions differ")


def rational_matmul_exact(A: Sequence[Sequence], B: Sequence[Sequence]
                          ) -> List[List[Fraction]]:
    """Exact product of midpoint matrices given as nested row lists."""
    _check_dims(A, B)
    Af = [[as_fraction(v) for v in row] for row in A]
    Bf = [[as_fraction(v) for v in row] for row in B]
    cols = len(Bf[0]) if Bf else 0
    return [[sum((row[j] * Bf[j][k] for j in range(len(row))), Fraction(0))
             for k in range(cols)] for row in Af]


def interval_matmul_hull(A: Sequence[Sequence[Ball]], B: Sequence[Sequence[Ball]]
                         ) -> List[List[RationalInterval]]:
    _check_dims(A, B)
    Ai = [[ball_to_interval(v) for v in row] for row in A]
    Bi = [[ball_to_interval(v) for v in row] for row in B]
    cols = len(Bi[0]) if Bi else 0
    zero = RationalInterval(Fraction(0), Fraction(0))
    out = []
    for row in Ai:
        out_row = []
        for k in range(cols):
            acc = zero
            for j, a in enumerate(row):
                acc = acc + a * Bi[j][k]
            out_row.append(acc)
        out.append(out_row)
    return out


def rational_convolution(a: Sequence, b: Sequence, n: int) -> List[Fraction]:
    af = [as_fraction(v) for v in a]
    bf = [as_fraction(v) for v in b]
    out = []
    for k in range(n):
        out.append(sum((af[i] * bf[k - i] for i in range(k + 1)
                        if i < len(af) and k - i < len(bf)), Fraction(0)))
    return out


def rational_exp_series(a: Sequence, n: int) -> List[Fraction]:
    """Coefficients of ``exp(a(x)) mod x**n`` by the exact recurrence."""
    af = [as_fraction(v) for v in a]
    if af and af[0] != 0:
        raise ValueError("constant term must be zero")
    coef = lambda j: af[j] if j < len(af) else Fraction(0)
    b = [Fraction(1)] if n else []
    for k in range(1, n):
        b.append(sum((j * coef(j) * b[k - j] for j in range(1, k + 1)),
                     Fraction(0)) / k)
    return b
