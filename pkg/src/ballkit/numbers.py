"""Arbitrary-precision floats, upper-bound radii and balls.

An :class:`ApFloat` is ``(-1)**sign * 2**exp * sum(b_k * 2**(64*(k-n)))`` with
normalized limbs: the top limb has its high bit set and the bottom limb is
nonzero, so ``2**(exp-1) <= |x| < 2**exp`` and ``n`` is minimal.  The limbs are
held packed in one Python integer ``man`` of exactly ``64*n`` bits; the
:attr:`ApFloat.limbs` view unpacks them.

A :class:`Mag` is an upper bound ``(b / 2**30) * 2**f`` with a 30-bit mantissa.
Every operation producing a :class:`Mag` rounds up.
"""

from __future__ import annotations

import enum
import re
from typing import Optional, Tuple

from .limbs import LIMB_BITS, from_int, to_int

MAG_BITS = 30
_MAG_LO = 1 << (MAG_BITS - 1)
_MAG_HI = 1 << MAG_BITS

# Single signed word exponents.
EXP_MIN = -(1 << (LIMB_BITS - 1))
EXP_MAX = (1 << (LIMB_BITS - 1)) - 1


class Kind(enum.IntEnum):
    ZERO = 0
    FINITE = 1
    POS_INF = 2
    NEG_INF = 3
    NAN = 4


ZERO, FINITE, POS_INF, NEG_INF, NAN = (Kind.ZERO, Kind.FINITE, Kind.POS_INF,
                                       Kind.NEG_INF, Kind.NAN)


class ExponentOverflowError(ArithmeticError):
    """An exponent left the single-word range."""


class ApFloat:
    __slots__ = ("kind", "sign", "exp", "man", "n")

    def __init__(self, kind: Kind, sign: int = 0, exp: int = 0, man: int = 0,
                 n: int = 0):
        self.kind = kind
        self.sign = sign
        self.exp = exp
        self.man = man
        self.n = n

    # -- construction -----------------------------------------------------

    @classmethod
    def from_man_exp(cls, sign: int, m: int, k: int) -> "ApFloat":
        """Canonical form of ``(-1)**sign * m * 2**k`` for an integer ``m >= 0``."""
        if m == 0:
            return APF_ZERO
        tz = (m & -m).bit_length() - 1
        m >>= tz
        w = m.bit_length()
        n = (w + LIMB_BITS - 1) // LIMB_BITS
        e = k + tz + w
        if e > EXP_MAX or e < EXP_MIN:
            raise ExponentOverflowError(e)
        return cls(FINITE, sign, e, m << (LIMB_BITS * n - w), n)

    @classmethod
    def from_int(cls, v: int) -> "ApFloat":
        return cls.from_man_exp(1 if v < 0 else 0, abs(v), 0)

    @classmethod
    def from_float(cls, x: float) -> "ApFloat":
        if x != x:
            return APF_NAN
        if x in (float("inf"), float("-inf")):
            return APF_POS_INF if x > 0 else APF_NEG_INF
        num, den = abs(x).as_integer_ratio()
        return cls.from_man_exp(1 if x < 0 else 0, num, -(den.bit_length() - 1))

    @classmethod
    def from_fraction(cls, q, prec: int) -> "ApFloat":
        """``q`` truncated toward zero to ``prec`` bits (exact if dyadic and short)."""
        num, den = q.numerator, q.denominator
        if num == 0:
            return APF_ZERO
        sign = 1 if num < 0 else 0
        num = abs(num)
        shift = prec + den.bit_length() - num.bit_length() + 1
        if shift > 0:
            m = (num << shift) // den
        else:
            m = num // (den << -shift)
        x = cls.from_man_exp(sign, m, -shift)
        return apfloat_round(x, prec)[0]

    # -- views ------------------------------------------------------------

    @property
    def limbs(self) -> list:
        return from_int(self.man, self.n)

    @property
    def bits(self) -> int:
        """Number of significant bits (0 for non-finite values)."""
        if self.kind is not FINITE:
            return 0
        m = self.man
        return LIMB_BITS * self.n - ((m & -m).bit_length() - 1)

    def is_zero(self) -> bool:
        return self.kind is ZERO

    def is_finite(self) -> bool:
        return self.kind is FINITE or self.kind is ZERO

    def man_exp(self) -> Tuple[int, int, int]:
        """``(sign, m, k)`` with value ``(-1)**sign * m * 2**k``."""
        return self.sign, self.man, self.exp - LIMB_BITS * self.n

    # -- cheap exact operations ------------------------------------------

    def __neg__(self) -> "ApFloat":
        if self.kind is FINITE:
            return ApFloat(FINITE, self.sign ^ 1, self.exp, self.man, self.n)
        if self.kind is POS_INF:
            return APF_NEG_INF
        if self.kind is NEG_INF:
            return APF_POS_INF
        return self

    def __abs__(self) -> "ApFloat":
        if self.kind is FINITE and self.sign:
            return -self
        if self.kind is NEG_INF:
            return APF_POS_INF
        return self

    def mul_2exp(self, k: int) -> "ApFloat":
        if self.kind is not FINITE:
            return self
        e = self.exp + k
        if e > EXP_MAX or e < EXP_MIN:
            raise ExponentOverflowError(e)
        return ApFloat(FINITE, self.sign, e, self.man, self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ApFloat):
            return NotImplemented
        if self.kind is not other.kind:
            return False
        if self.kind is not FINITE:
            return True
        return (self.sign == other.sign and self.exp == other.exp
                and self.man == other.man and self.n == other.n)

    def __hash__(self):
        return hash((self.kind, self.sign, self.exp, self.man))

    def __repr__(self) -> str:
        return f"ApFloat({format_apfloat(self)})"

    def __float__(self) -> float:
        if self.kind is ZERO:
            return 0.0
        if self.kind is POS_INF:
            return float("inf")
        if self.kind is NEG_INF:
            return float("-inf")
        if self.kind is NAN:
            return float("nan")
        top = self.man >> (LIMB_BITS * self.n - 64)
        v = float(top) * 2.0 ** (self.exp - 64) if self.exp - 64 < 1024 else float("inf")
        return -v if self.sign else v


APF_ZERO = ApFloat(ZERO)
APF_POS_INF = ApFloat(POS_INF)
APF_NEG_INF = ApFloat(NEG_INF)
APF_NAN = ApFloat(NAN)
APF_ONE = ApFloat.from_int(1)


def apfloat_normalize(sign: int, e: int, raw_limbs) -> ApFloat:
    """Canonical float for ``(-1)**sign * 2**e * sum(raw[k] * 2**(64*(k-len)))``.

    Raises :class:`ExponentOverflowError` if the normalized exponent does not
    fit a signed word.
    """
    return ApFloat.from_man_exp(sign, to_int(raw_limbs), e - LIMB_BITS * len(raw_limbs))


class Mag:
    """Nonnegative upper bound ``(b / 2**30) * 2**f``, zero or ``+inf``."""

    __slots__ = ("kind", "b", "f")

    def __init__(self, kind: Kind, b: int = 0, f: int = 0):
        self.kind = kind
        self.b = b
        self.f = f

    @classmethod
    def from_int_exp(cls, m: int, k: int) -> "Mag":
        """Smallest representable bound ``>= m * 2**k`` (``m >= 0``)."""
        if m == 0:
            return MAG_ZERO
        bl = m.bit_length()
        if bl <= MAG_BITS:
            return cls(FINITE, m << (MAG_BITS - bl), k + bl)
        drop = bl - MAG_BITS
        b = m >> drop
        if m & ((1 << drop) - 1):
            b += 1
            if b == _MAG_HI:
                return cls(FINITE, _MAG_LO, k + bl + 1)
        return cls(FINITE, b, k + bl)

    @classmethod
    def from_weak(cls, b: int, f: int) -> "Mag":
        """Canonicalize a weakly normalized mantissa ``2**29 <= b <= 2**30``."""
        if b == _MAG_HI:
            return cls(FINITE, _MAG_LO, f + 1)
        return cls(FINITE, b, f)

    @classmethod
    def from_float(cls, x: float) -> "Mag":
        if x != x or x < 0:
            raise ValueError("Mag needs a nonnegative number")
        if x == float("inf"):
            return MAG_INF
        num, den = x.as_integer_ratio()
        return cls.from_int_exp(num, -(den.bit_length() - 1))

    def is_zero(self) -> bool:
        return self.kind is ZERO

    def is_finite(self) -> bool:
        return self.kind is not POS_INF

    def man_exp(self) -> Tuple[int, int]:
        return self.b, self.f - MAG_BITS

    def mul_2exp(self, k: int) -> "Mag":
        if self.kind is not FINITE:
            return self
        return Mag(FINITE, self.b, self.f + k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mag):
            return NotImplemented
        if self.kind is not other.kind:
            return False
        return self.kind is not FINITE or (self.b == other.b and self.f == other.f)

    def __hash__(self):
        return hash((self.kind, self.b, self.f))

    def __le__(self, other: "Mag") -> bool:
        return mag_cmp(self, other) <= 0

    def __lt__(self, other: "Mag") -> bool:
        return mag_cmp(self, other) < 0

    def __repr__(self) -> str:
        return f"Mag({format_mag(self)})"

    def __float__(self) -> float:
        if self.kind is ZERO:
            return 0.0
        if self.kind is POS_INF or self.f > 1024:
            return float("inf")
        if self.f < -1100:
            return 0.0
        return self.b * 2.0 ** (self.f - MAG_BITS)


MAG_ZERO = Mag(ZERO)
MAG_INF = Mag(POS_INF)


def mag_cmp(a: Mag, b: Mag) -> int:
    if a.kind is not FINITE or b.kind is not FINITE:
        return (a.kind > b.kind) - (a.kind < b.kind)
    if a.f != b.f:
        return 1 if a.f > b.f else -1
    return (a.b > b.b) - (a.b < b.b)


def mag_upper_from_apfloat(x: ApFloat) -> Mag:
    """Bound on ``|x|``: top 30 bits of the top limb, plus one."""
    if x.kind is ZERO:
        return MAG_ZERO
    if x.kind is not FINITE:
        return MAG_INF
    b = (x.man >> (LIMB_BITS * x.n - MAG_BITS)) + 1
    return Mag.from_weak(b, x.exp)


def mag_add_up(a: Mag, b: Mag) -> Mag:
    if a.kind is ZERO:
        return b
    if b.kind is ZERO:
        return a
    if a.kind is POS_INF or b.kind is POS_INF:
        return MAG_INF
    if a.f < b.f:
        a, b = b, a
    d = a.f - b.f
    if d < 2 * LIMB_BITS:
        return Mag.from_int_exp((a.b << d) + b.b, b.f - MAG_BITS)
    # b < 2**(a.f - 128): one unit 34 bits below a's mantissa covers it
    return Mag.from_int_exp((a.b << 4) + 1, a.f - MAG_BITS - 4)


def mag_mul_up(a: Mag, b: Mag) -> Mag:
    if a.kind is ZERO or b.kind is ZERO:
        return MAG_ZERO
    if a.kind is POS_INF or b.kind is POS_INF:
        return MAG_INF
    return Mag.from_int_exp(a.b * b.b, a.f + b.f - 2 * MAG_BITS)


def mag_div_int_up(a: Mag, k: int) -> Mag:
    if a.kind is not FINITE:
        return a
    num = a.b << (2 * MAG_BITS)
    q = -(-num // k)
    return Mag.from_int_exp(q, a.f - 3 * MAG_BITS)


def round_man_exp(sign: int, m: int, k: int, p: int) -> Tuple[ApFloat, Mag]:
    """Truncate ``(-1)**sign * m * 2**k`` to ``p`` significant bits.

    Returns the rounded float and an upper bound on the discarded amount.
    """
    bl = m.bit_length()
    if bl <= p:
        return ApFloat.from_man_exp(sign, m, k), MAG_ZERO
    drop = bl - p
    rem = m & ((1 << drop) - 1)
    return (ApFloat.from_man_exp(sign, m >> drop, k + drop),
            Mag.from_int_exp(rem, k))


def apfloat_round(x: ApFloat, p: int) -> Tuple[ApFloat, Mag]:
    """Round toward zero to ``p`` bits; the second item bounds ``|x - result|``."""
    if p < 2:
        raise ValueError("precision must be at least 2")
    if x.kind is not FINITE or x.bits <= p:
        return x, MAG_ZERO
    return round_man_exp(x.sign, x.man, x.exp - LIMB_BITS * x.n, p)


def add_round(sa: int, ma: int, ka: int, sb: int, mb: int, kb: int,
              p: int) -> Tuple[ApFloat, Mag]:
    """``(-1)**sa*ma*2**ka + (-1)**sb*mb*2**kb`` rounded to ``p`` bits, plus error bound.

    Operands far below the ``p``-bit window of the other are not added
    exactly; their magnitude is charged to the error bound instead.
    """
    if mb == 0:
        return round_man_exp(sa, ma, ka, p) if ma else (APF_ZERO, MAG_ZERO)
    if ma == 0:
        return round_man_exp(sb, mb, kb, p)
    ta = ka + ma.bit_length()
    tb = kb + mb.bit_length()
    if tb < ta - p - 4 and tb < ka:
        x, err = round_man_exp(sa, ma, ka, p)
        return x, mag_add_up(err, Mag.from_int_exp(mb, kb))
    if ta < tb - p - 4 and ta < kb:
        x, err = round_man_exp(sb, mb, kb, p)
        return x, mag_add_up(err, Mag.from_int_exp(ma, ka))
    k = min(ka, kb)
    va = ma << (ka - k)
    vb = mb << (kb - k)
    v = (-va if sa else va) + (-vb if sb else vb)
    if v == 0:
        return APF_ZERO, MAG_ZERO
    return round_man_exp(1 if v < 0 else 0, abs(v), k, p)


class Ball:
    """The set ``{x : |x - mid| <= rad}``; a NaN midpoint means "anything"."""

    __slots__ = ("mid", "rad")

    def __init__(self, mid: ApFloat, rad: Mag = MAG_ZERO):
        self.mid = mid
        self.rad = rad

    @classmethod
    def exact(cls, v) -> "Ball":
        if isinstance(v, int):
            return cls(ApFloat.from_int(v))
        if isinstance(v, float):
            return cls(ApFloat.from_float(v))
        return cls(v)

    @classmethod
    def indeterminate(cls) -> "Ball":
        return cls(APF_NAN, MAG_INF)

    def is_exact(self) -> bool:
        return self.rad.kind is ZERO

    def is_finite(self) -> bool:
        return self.mid.is_finite() and self.rad.kind is not POS_INF

    def __neg__(self) -> "Ball":
        return Ball(-self.mid, self.rad)

    def mul_2exp(self, k: int) -> "Ball":
        return Ball(self.mid.mul_2exp(k), self.rad.mul_2exp(k))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ball):
            return NotImplemented
        return self.mid == other.mid and self.rad == other.rad

    def __hash__(self):
        return hash((self.mid, self.rad))

    def __repr__(self) -> str:
        return f"Ball({format_ball(self)})"


class ComplexBall:
    __slots__ = ("re", "im")

    def __init__(self, re: Ball, im: Optional[Ball] = None):
        self.re = re
        self.im = im if im is not None else BALL_ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexBall):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"ComplexBall({format_ball(self.re)} ; {format_ball(self.im)})"


BALL_ZERO = Ball(APF_ZERO, MAG_ZERO)
BALL_ONE = Ball(APF_ONE, MAG_ZERO)


# -- ball arithmetic used outside the fused dot product ----------------------

def _special_mid(acc: ApFloat, x: ApFloat, y: ApFloat) -> ApFloat:
    """Midpoint of ``acc + x*y`` when some input is infinite or NaN."""
    if NAN in (acc.kind, x.kind, y.kind):
        return APF_NAN
    if x.kind is ZERO or y.kind is ZERO:
        prod = 0
        if x.kind in (POS_INF, NEG_INF) or y.kind in (POS_INF, NEG_INF):
            return APF_NAN
    else:
        sx = -1 if x.kind is NEG_INF or (x.kind is FINITE and x.sign) else 1
        sy = -1 if y.kind is NEG_INF or (y.kind is FINITE and y.sign) else 1
        inf = x.kind is not FINITE or y.kind is not FINITE
        prod = sx * sy * (2 if inf else 1)
    a = 0
    if acc.kind is POS_INF:
        a = 2
    elif acc.kind is NEG_INF:
        a = -2
    if abs(a) == 2 and abs(prod) == 2:
        if a != prod:
            return APF_NAN
        return APF_POS_INF if a > 0 else APF_NEG_INF
    if abs(a) == 2:
        return APF_POS_INF if a > 0 else APF_NEG_INF
    return APF_POS_INF if prod > 0 else APF_NEG_INF


def ball_fallback_addmul(acc: Ball, x: Ball, y: Ball, p: int) -> Ball:
    """Plain multiply-add ``acc + x*y`` with one rounding of the midpoint.

    This is the term-by-term path: every call normalizes, rounds and bounds
    its own error.  Non-finite inputs give a ball with infinite radius.
    """
    am, xm, ym = acc.mid, x.mid, y.mid
    if not (am.is_finite() and xm.is_finite() and ym.is_finite()):
        return Ball(_special_mid(am, xm, ym), MAG_INF)
    if (acc.rad.kind is POS_INF or x.rad.kind is POS_INF
            or y.rad.kind is POS_INF):
        return Ball(APF_NAN, MAG_INF)
    try:
        if xm.kind is FINITE and ym.kind is FINITE:
            ps = xm.sign ^ ym.sign
            pm = xm.man * ym.man
            pk = xm.exp + ym.exp - LIMB_BITS * (xm.n + ym.n)
        else:
            ps = pm = pk = 0
        if am.kind is FINITE:
            mid, err = add_round(am.sign, am.man, am.exp - LIMB_BITS * am.n,
                                 ps, pm, pk, p)
        else:
            mid, err = add_round(0, 0, 0, ps, pm, pk, p)
    except ExponentOverflowError:
        return Ball.indeterminate()
    rad = mag_add_up(acc.rad, err)
    if y.rad.kind is FINITE:
        rad = mag_add_up(rad, mag_mul_up(mag_upper_from_apfloat(xm), y.rad))
    if x.rad.kind is FINITE:
        rad = mag_add_up(rad, mag_mul_up(mag_upper_from_apfloat(ym), x.rad))
        rad = mag_add_up(rad, mag_mul_up(x.rad, y.rad))
    return Ball(mid, rad)


def ball_add(x: Ball, y: Ball, p: int) -> Ball:
    return ball_fallback_addmul(x, y, BALL_ONE, p)


def ball_sub(x: Ball, y: Ball, p: int) -> Ball:
    return ball_fallback_addmul(x, -y, BALL_ONE, p)


def ball_mul(x: Ball, y: Ball, p: int) -> Ball:
    return ball_fallback_addmul(BALL_ZERO, x, y, p)


def ball_add_man_exp(acc: Ball, sign: int, m: int, k: int, p: int) -> Ball:
    """``acc + (-1)**sign * m * 2**k`` with the rounding error added to the radius."""
    am = acc.mid
    if not am.is_finite():
        return acc
    try:
        if am.kind is FINITE:
            mid, err = add_round(am.sign, am.man, am.exp - LIMB_BITS * am.n,
                                 sign, m, k, p)
        else:
            mid, err = add_round(0, 0, 0, sign, m, k, p)
    except ExponentOverflowError:
        return Ball.indeterminate()
    return Ball(mid, mag_add_up(acc.rad, err))


def ball_mul_int(x: Ball, k: int) -> Ball:
    """Exact midpoint times a small integer; radius scaled upward."""
    if not x.mid.is_finite():
        return Ball.indeterminate() if k == 0 else Ball(x.mid, MAG_INF)
    mid = APF_ZERO
    if x.mid.kind is FINITE and k:
        s, m, e = x.mid.man_exp()
        mid = ApFloat.from_man_exp(s ^ (1 if k < 0 else 0), m * abs(k), e)
    return Ball(mid, mag_mul_up(x.rad, Mag.from_int_exp(abs(k), 0)))


def ball_div_int(x: Ball, k: int, p: int) -> Ball:
    """``x / k`` for a nonzero integer ``k``: truncated midpoint quotient plus one ulp."""
    if k == 0:
        raise ZeroDivisionError("ball division by zero")
    if not x.mid.is_finite():
        return Ball(x.mid, MAG_INF)
    rad = mag_div_int_up(x.rad, abs(k))
    if x.mid.kind is ZERO:
        return Ball(APF_ZERO, rad)
    s, m, e = x.mid.man_exp()
    s ^= 1 if k < 0 else 0
    k = abs(k)
    shift = max(0, p + k.bit_length() + 1 - m.bit_length())
    q, r = divmod(m << shift, k)
    mid, err = round_man_exp(s, q, e - shift, p)
    if r:
        err = mag_add_up(err, Mag.from_int_exp(1, e - shift))
    return Ball(mid, mag_add_up(rad, err))


# -- text serialization ------------------------------------------------------

def format_apfloat(x: ApFloat) -> str:
    if x.kind is ZERO:
        return "0"
    if x.kind is POS_INF:
        return "+inf"
    if x.kind is NEG_INF:
        return "-inf"
    if x.kind is NAN:
        return "nan"
    limbs = ":".join(f"{limb:016x}" for limb in reversed(x.limbs))
    return f"({'-' if x.sign else '+'}, {x.exp}, {limbs})"


def format_mag(r: Mag) -> str:
    if r.kind is ZERO:
        return "0"
    if r.kind is POS_INF:
        return "inf"
    return f"({r.b:08x}, {r.f})"


def format_ball(x: Ball) -> str:
    return f"{format_apfloat(x.mid)} ± {format_mag(x.rad)}"


_APF_RE = re.compile(r"^\(\s*([+-])\s*,\s*(-?\d+)\s*,\s*([0-9a-fA-F:]+)\s*\)$")
_MAG_RE = re.compile(r"^\(\s*([0-9a-fA-F]+)\s*,\s*(-?\d+)\s*\)$")


def parse_apfloat(text: str) -> ApFloat:
    text = text.strip()
    special = {"0": APF_ZERO, "+inf": APF_POS_INF, "inf": APF_POS_INF,
               "-inf": APF_NEG_INF, "nan": APF_NAN}
    if text in special:
        return special[text]
    mt = _APF_RE.match(text)
    if not mt:
        raise ValueError(f"bad float literal: {text!r}")
    limbs = [int(h, 16) for h in reversed(mt.group(3).split(":"))]
    x = apfloat_normalize(1 if mt.group(1) == "-" else 0, int(mt.group(2)), limbs)
    if x.n != len(limbs):
        raise ValueError(f"limbs not normalized: {text!r}")
    return x


def parse_mag(text: str) -> Mag:
    text = text.strip()
    if text == "0":
        return MAG_ZERO
    if text == "inf":
        return MAG_INF
    mt = _MAG_RE.match(text)
    if not mt:
        raise ValueError(f"bad radius literal: {text!r}")
    b = int(mt.group(1), 16)
    if not _MAG_LO <= b < _MAG_HI:
        raise ValueError(f"radius mantissa not normalized: {text!r}")
    return Mag(FINITE, b, int(mt.group(2)))


def parse_ball(text: str) -> Ball:
    for sep in ("±", "+/-"):
        if sep in text:
            mid, rad = text.split(sep, 1)
            return Ball(parse_apfloat(mid), parse_mag(rad))
    return Ball(parse_apfloat(text))
