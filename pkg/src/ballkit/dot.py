"""Fused dot product over balls and floats.

The whole sum is accumulated in one fixed-point two's complement buffer of
``n_s`` limbs whose top sits ``extend`` bits above the largest term.  Each
term contributes only the limbs overlapping that window; everything below is
charged to an ulp counter ``err``.  Radius terms go to a single word ``srad``
scaled by ``2**(e_rad - 30)``.  Rounding, normalization and error bounding
happen once, at the end.

Two evaluation engines exist.  The limb engine (``fast=False``) runs
:func:`dot_accumulate_term` on a list of words with the primitives from
:mod:`ballkit.limbs`.  The packed engine (default) holds the accumulator as a
single Python integer and performs the same truncations; both produce
bit-identical balls.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import limbs as lk
from .limbs import LIMB_BITS
from .numbers import (APF_NAN, APF_ZERO, BALL_ONE, BALL_ZERO, FINITE, MAG_BITS,
                      MAG_INF, MAG_ZERO, POS_INF, ZERO, ApFloat, Ball,
                      ComplexBall, Mag, ball_fallback_addmul, mag_add_up)

WORD_MIN = -(1 << (LIMB_BITS - 1))
WORD_MAX = (1 << (LIMB_BITS - 1)) - 1
# exponents beyond this go to the fallback path
EXP_SAFE = 1 << (LIMB_BITS - 4)
MULHIGH_MIN_BITS = 25 * LIMB_BITS
COMPLEX_THREE_MUL_LIMBS = 128


class Status(enum.Enum):
    PROCEED = "proceed"
    FALLBACK = "fallback"
    ZERO_RESULT = "zero"


def bc(v: int) -> int:
    """Binary length of ``v``: ``ceil(log2(v + 1))``."""
    return v.bit_length()


@dataclass
class DotPlan:
    status: Status
    e_max: int = WORD_MIN
    e_min: int = WORD_MAX
    e_rad: int = WORD_MIN
    n_nonzero: int = 0
    p_eff: int = 2
    extend: int = 0
    padding: int = 0
    n_s: int = 0
    e_s: int = 0


@dataclass
class DotAccumulator:
    s: List[int]
    err: int = 0
    srad: int = 0

    @classmethod
    def for_plan(cls, plan: DotPlan) -> "DotAccumulator":
        return cls([0] * plan.n_s)


def dot_setup(terms: Sequence[Tuple[Ball, Ball]], p: int,
              radius: bool = True) -> DotPlan:
    """First pass: classify the terms and fix the accumulator geometry."""
    xs = [t[0] for t in terms]
    ys = [t[1] for t in terms]
    return _setup(xs, ys, p, radius)


def _setup(xs: Sequence[Ball], ys: Sequence[Ball], p: int,
           radius: bool, reduce: bool = True) -> DotPlan:
    if p < 2:
        raise ValueError("precision must be at least 2")
    e_max = WORD_MIN
    e_min = WORD_MAX
    e_rad = WORD_MIN
    nnz = 0
    track_min = p > 2 * LIMB_BITS
    lim = EXP_SAFE
    fallback = DotPlan(Status.FALLBACK)
    for x, y in zip(xs, ys):
        mx = x.mid
        my = y.mid
        kx = mx.kind
        ky = my.kind
        if kx is FINITE:
            if not -lim < mx.exp < lim:
                return fallback
        elif kx is not ZERO:
            return fallback
        if ky is FINITE:
            if not -lim < my.exp < lim:
                return fallback
        elif ky is not ZERO:
            return fallback
        if kx is FINITE and ky is FINITE:
            nnz += 1
            e = mx.exp + my.exp
            if e > e_max:
                e_max = e
            if track_min:
                e = e - LIMB_BITS * (mx.n + my.n)
                if e < e_min:
                    e_min = e
        if radius:
            rx = x.rad
            ry = y.rad
            if rx.kind is FINITE:
                if not -lim < rx.f < lim:
                    return fallback
                if ky is FINITE and my.exp + rx.f > e_rad:
                    e_rad = my.exp + rx.f
            elif rx.kind is POS_INF:
                return fallback
            if ry.kind is FINITE:
                if not -lim < ry.f < lim:
                    return fallback
                if kx is FINITE and mx.exp + ry.f > e_rad:
                    e_rad = mx.exp + ry.f
                if rx.kind is FINITE and rx.f + ry.f > e_rad:
                    e_rad = rx.f + ry.f
            elif ry.kind is POS_INF:
                return fallback

    if e_max == WORD_MIN and e_rad == WORD_MIN:
        return DotPlan(Status.ZERO_RESULT, n_nonzero=0)
    if e_max == WORD_MIN:
        p = 2
    elif reduce:
        if e_rad != WORD_MIN:
            p = min(p, e_max - e_rad + MAG_BITS)
        if e_min != WORD_MAX:
            p = min(p, e_max - e_min + MAG_BITS)
        p = max(p, 2)
    padding = 4 + bc(len(xs))
    extend = bc(nnz) + 1
    n_s = max(2, -(-(p + extend + padding) // LIMB_BITS))
    return DotPlan(Status.PROCEED, e_max, e_min, e_rad, nnz, p, extend,
                   padding, n_s, e_max + extend)


# -- limb engine ------------------------------------------------------------

def _use_mulhigh(p_t: int, n: int, n2: int) -> bool:
    return p_t >= MULHIGH_MIN_BITS and n * LIMB_BITS * 10 > 9 * p_t


def dot_accumulate_term(plan: DotPlan, acc: DotAccumulator, m: ApFloat,
                        m2: ApFloat, negate: bool = False,
                        mulhigh: bool = True) -> None:
    """Add (or subtract) the window-overlapping limbs of ``m*m2`` to ``acc``."""
    n_s = plan.n_s
    shift = plan.e_s - (m.exp + m2.exp)
    if shift >= LIMB_BITS * n_s:
        acc.err += 1
        return
    shift_limbs, shift_bits = divmod(shift, LIMB_BITS)
    p_t = LIMB_BITS * n_s - shift
    n2 = -(-p_t // LIMB_BITS) + 1
    a = m.limbs
    b = m2.limbs
    if len(a) > n2 or len(b) > n2:
        acc.err += 1
        a = a[-n2:]
        b = b[-n2:]
    if (mulhigh and _use_mulhigh(p_t, min(m.n, m2.n), n2)
            and n2 < len(a) + len(b)):
        t, _ = lk.mulhigh_approx(a, b, n2)
        acc.err += 1
    else:
        t = lk.mul_limbs(a, b)
    if shift_bits:
        t = lk.rshift_bits(t, shift_bits)
    lo = 0
    while t[lo] == 0:
        lo += 1
    t = t[lo:]
    n_t = len(t)
    if shift_limbs + n_t <= n_s:
        ds = n_s - shift_limbs - n_t
        dt = 0
        v = n_t
    else:
        ds = 0
        dt = n_t - n_s + shift_limbs
        v = n_s - shift_limbs
        acc.err += 1
    lk.add_signed_range(acc.s, t[dt:dt + v], ds, shift_limbs, negate)


def dot_accumulate_radius(acc: DotAccumulator, a: Mag, b: Mag,
                          e_rad: int) -> None:
    """``srad += floor(a*b / 2**(30 + e_rad - e)) + 1`` (or just ``+1`` far below).

    ``a`` and ``b`` may be weakly normalized (mantissa up to ``2**30``).
    """
    if a.kind is ZERO or b.kind is ZERO:
        return
    d = e_rad - (a.f + b.f)
    if d < 0:
        raise ValueError("radius term above e_rad")
    if d < MAG_BITS:
        acc.srad += ((a.b * b.b) >> (MAG_BITS + d)) + 1
    else:
        acc.srad += 1


def _mid_bound(x: ApFloat) -> Mag:
    # weakly normalized: keep exponent x.exp even when the mantissa hits 2**30
    return Mag(FINITE, (x.man >> (LIMB_BITS * x.n - MAG_BITS)) + 1, x.exp)


def _radius_terms_limb(plan: DotPlan, acc: DotAccumulator, x: Ball,
                       y: Ball) -> None:
    mx, my, rx, ry = x.mid, y.mid, x.rad, y.rad
    if ry.kind is FINITE and mx.kind is FINITE:
        dot_accumulate_radius(acc, _mid_bound(mx), ry, plan.e_rad)
    if rx.kind is FINITE and my.kind is FINITE:
        dot_accumulate_radius(acc, _mid_bound(my), rx, plan.e_rad)
    if rx.kind is FINITE and ry.kind is FINITE:
        dot_accumulate_radius(acc, rx, ry, plan.e_rad)


def dot_finalize(plan: DotPlan, acc: DotAccumulator, p: Optional[int] = None,
                 radius: bool = True) -> Ball:
    """Convert the accumulator state into a rounded, normalized ball."""
    s = list(acc.s)
    sign = 0
    if s[-1] >> (LIMB_BITS - 1):
        lk.neg_in_place(s)
        sign = 1
    return _finalize_int(plan, sign, lk.to_int(s), acc.err, acc.srad,
                         plan.p_eff if p is None else p, radius)


def _finalize_int(plan: DotPlan, sign: int, s: int, err: int, srad: int,
                  p: int, radius: bool) -> Ball:
    unit = plan.e_s - LIMB_BITS * plan.n_s
    rem = 0
    if s == 0:
        mid = APF_ZERO
    else:
        bl = s.bit_length()
        if bl > p:
            drop = bl - p
            rem = s & ((1 << drop) - 1)
            mid = ApFloat.from_man_exp(sign, s >> drop, unit + drop)
        else:
            mid = ApFloat.from_man_exp(sign, s, unit)
    if not radius:
        return Ball(mid, MAG_ZERO)
    rad = Mag.from_int_exp(rem + err, unit)
    if srad:
        rad = mag_add_up(rad, Mag.from_int_exp(srad, plan.e_rad - MAG_BITS))
    return Ball(mid, rad)


# -- packed engine ------------------------------------------------------------

def _eval_packed(plan: DotPlan, xs: Sequence[Ball], ys: Sequence[Ball],
                 neg: int, do_mid: bool, do_rad: bool,
                 mulhigh: bool) -> Tuple[int, int, int]:
    """Second pass over ``xs``/``ys``; returns ``(s, err, srad)`` with ``s`` signed."""
    n_s = plan.n_s
    e_s = plan.e_s
    width = LIMB_BITS * n_s
    e_rad = plan.e_rad
    s = 0
    err = 0
    srad = 0
    for x, y in zip(xs, ys):
        mx = x.mid
        my = y.mid
        fx = mx.kind is FINITE
        fy = my.kind is FINITE
        if do_mid and fx and fy:
            shift = e_s - mx.exp - my.exp
            if shift >= width:
                err += 1
            else:
                a = mx.man
                b = my.man
                na = mx.n
                nb = my.n
                p_t = width - shift
                n2 = (p_t + 127) >> 6
                if na > n2 or nb > n2:
                    err += 1
                    if na > n2:
                        a >>= (na - n2) << 6
                        na = n2
                    if nb > n2:
                        b >>= (nb - n2) << 6
                        nb = n2
                if (mulhigh and p_t >= MULHIGH_MIN_BITS
                        and min(mx.n, my.n) * 640 > 9 * p_t
                        and n2 < na + nb):
                    tl, _ = lk.mulhigh_approx(lk.from_int(a, na),
                                              lk.from_int(b, nb), n2)
                    t = lk.to_int(tl)
                    n_t = n2
                    err += 1
                else:
                    t = a * b
                    n_t = na + nb
                shift_limbs = shift >> 6
                shift_bits = shift & 63
                if shift_bits:
                    t <<= 64 - shift_bits
                    n_t += 1
                d = n_s - shift_limbs - n_t
                if d >= 0:
                    t <<= d << 6
                else:
                    q = (-d) << 6
                    if t & ((1 << q) - 1):
                        err += 1
                    t >>= q
                if mx.sign ^ my.sign ^ neg:
                    s -= t
                else:
                    s += t
        if do_rad:
            rx = x.rad
            ry = y.rad
            if ry.kind is FINITE:
                if fx:
                    dd = e_rad - mx.exp - ry.f
                    if dd < 30:
                        srad += ((((mx.man >> ((mx.n << 6) - 30)) + 1) * ry.b)
                                 >> (30 + dd)) + 1
                    else:
                        srad += 1
                if rx.kind is FINITE:
                    dd = e_rad - rx.f - ry.f
                    if dd < 30:
                        srad += ((rx.b * ry.b) >> (30 + dd)) + 1
                    else:
                        srad += 1
            if rx.kind is FINITE and fy:
                dd = e_rad - my.exp - rx.f
                if dd < 30:
                    srad += ((((my.man >> ((my.n << 6) - 30)) + 1) * rx.b)
                             >> (30 + dd)) + 1
                else:
                    srad += 1
    return s, err, srad


def _add_product_packed(plan: DotPlan, sign: int, t: int, k: int,
                        top: int) -> Tuple[int, int]:
    """Window contribution of an exact product ``(-1)**sign * t * 2**k < 2**top``.

    Returns ``(signed limbs value, err increment)``.
    """
    if t == 0:
        return 0, 0
    width = LIMB_BITS * plan.n_s
    if plan.e_s - top >= width:
        return 0, 1
    d = k - (plan.e_s - width)
    inc = 0
    if d >= 0:
        t <<= d
    else:
        # discard whole limbs below s_0, as in the term path
        q = -d
        if t & ((1 << q) - 1):
            inc = 1
        t >>= q
    return (-t if sign else t), inc


# -- public entry points -------------------------------------------------------

def _gather(x: Sequence, n: int, start: int, step: int) -> list:
    if n == 0:
        return []
    last = start + (n - 1) * step
    if min(start, last) < 0 or max(start, last) >= len(x):
        raise IndexError("strided access out of range")
    return [x[start + i * step] for i in range(n)]


def _resolve_n(n, x, y, xstep, ystep):
    if n is not None:
        return n
    if xstep != 1 or ystep != 1:
        raise ValueError("n is required with non-unit strides")
    if len(x) != len(y):
        raise ValueError("length mismatch")
    return len(x)


def _fallback(initial: Optional[Ball], xs, ys, neg: int, p: int) -> Ball:
    acc = BALL_ZERO
    if initial is not None:
        acc = ball_fallback_addmul(acc, initial, BALL_ONE, p)
    for x, y in zip(xs, ys):
        acc = ball_fallback_addmul(acc, x, -y if neg else y, p)
    return acc


def _dot_real(xs: List[Ball], ys: List[Ball], p: int, initial: Optional[Ball],
              neg: int, radius: bool, fast: bool, mulhigh: bool,
              reduce: bool = True) -> Ball:
    px = xs + [initial] if initial is not None else xs
    py = ys + [BALL_ONE] if initial is not None else ys
    plan = _setup(px, py, p, radius, reduce)
    if plan.status is Status.ZERO_RESULT:
        return BALL_ZERO
    if plan.status is Status.FALLBACK:
        if not radius:
            xs = [Ball(b.mid) for b in xs]
            ys = [Ball(b.mid) for b in ys]
            if initial is not None:
                initial = Ball(initial.mid)
        res = _fallback(initial, xs, ys, neg, p)
        return res if radius else Ball(res.mid)
    if fast:
        s, err, srad = _eval_packed(plan, xs, ys, neg, True, radius, mulhigh)
        if initial is not None:
            s2, err2, srad2 = _eval_packed(plan, [initial], [BALL_ONE], 0,
                                           True, radius, mulhigh)
            s += s2
            err += err2
            srad += srad2
        sign = 1 if s < 0 else 0
        return _finalize_int(plan, sign, abs(s), err, srad, plan.p_eff, radius)
    acc = DotAccumulator.for_plan(plan)
    terms = list(zip(xs, ys, [neg] * len(xs)))
    if initial is not None:
        terms.append((initial, BALL_ONE, 0))
    for x, y, ng in terms:
        if x.mid.kind is FINITE and y.mid.kind is FINITE:
            dot_accumulate_term(plan, acc, x.mid, y.mid,
                                bool(x.mid.sign ^ y.mid.sign ^ ng), mulhigh)
        if radius:
            _radius_terms_limb(plan, acc, x, y)
    return dot_finalize(plan, acc, radius=radius)


def dot_ball(x: Sequence[Ball], y: Sequence[Ball], prec: int, *,
             n: Optional[int] = None, xstart: int = 0, xstep: int = 1,
             ystart: int = 0, ystep: int = 1, initial: Optional[Ball] = None,
             subtract: bool = False, fast: bool = True,
             mulhigh: bool = True, reduce_precision: bool = True) -> Ball:
    """Ball enclosing ``initial + (-1)**subtract * sum(x_i * y_i)``.

    Element ``i`` of ``x`` is ``x[xstart + i*xstep]``; steps may be negative,
    in which case ``n`` must be given.  ``fast=False`` selects the limb
    engine; ``reduce_precision=False`` disables the working-precision cuts
    (both exist for cross-checking).
    """
    n = _resolve_n(n, x, y, xstep, ystep)
    xs = _gather(x, n, xstart, xstep)
    ys = _gather(y, n, ystart, ystep)
    return _dot_real(xs, ys, prec, initial, 1 if subtract else 0, True, fast,
                     mulhigh, reduce_precision)


def dot_approx(x: Sequence[Ball], y: Sequence[Ball], prec: int, *,
               n: Optional[int] = None, xstart: int = 0, xstep: int = 1,
               ystart: int = 0, ystep: int = 1, initial: Optional[Ball] = None,
               subtract: bool = False, fast: bool = True,
               mulhigh: bool = True) -> ApFloat:
    """Floating-point dot product of the midpoints; radii are ignored."""
    n = _resolve_n(n, x, y, xstep, ystep)
    xs = _gather(x, n, xstart, xstep)
    ys = _gather(y, n, ystart, ystep)
    return _dot_real(xs, ys, prec, initial, 1 if subtract else 0, False, fast,
                     mulhigh).mid


def dot_naive(x: Sequence[Ball], y: Sequence[Ball], prec: int, *,
              initial: Optional[Ball] = None, subtract: bool = False) -> Ball:
    """Reference multiply-add loop, one rounded operation per term."""
    acc = initial if initial is not None else BALL_ZERO
    for a, b in zip(x, y):
        acc = ball_fallback_addmul(acc, a, -b if subtract else b, prec)
    return acc


# -- complex ---------------------------------------------------------------------

def _three_mul_ok(a: ApFloat, b: ApFloat, c: ApFloat, d: ApFloat,
                  cutoff: int) -> bool:
    if not (a.kind is FINITE and b.kind is FINITE and c.kind is FINITE
            and d.kind is FINITE):
        return False
    if min(a.n, b.n, c.n, d.n) < cutoff:
        return False
    return abs(a.exp - b.exp) <= LIMB_BITS and abs(c.exp - d.exp) <= LIMB_BITS


def _signed(x: ApFloat) -> Tuple[int, int]:
    s, m, k = x.man_exp()
    return (-m if s else m), k


def _dot_complex(xs: List[ComplexBall], ys: List[ComplexBall], p: int,
                 initial: Optional[ComplexBall], neg: int, radius: bool,
                 fast: bool, cutoff: int) -> ComplexBall:
    a = [z.re for z in xs]
    b = [z.im for z in xs]
    c = [z.re for z in ys]
    d = [z.im for z in ys]
    nd = [-v for v in d]
    re_x, re_y = a + b, c + nd
    im_x, im_y = a + b, d + c
    re_init = initial.re if initial is not None else None
    im_init = initial.im if initial is not None else None
    three = [i for i in range(len(xs))
             if _three_mul_ok(a[i].mid, b[i].mid, c[i].mid, d[i].mid, cutoff)]
    if not three or not fast:
        return ComplexBall(
            _dot_real(re_x, re_y, p, re_init, neg, radius, fast, True),
            _dot_real(im_x, im_y, p, im_init, neg, radius, fast, True))
    return ComplexBall(
        _dot_three(re_x, re_y, p, re_init, neg, radius, three, a, b, c, d, True),
        _dot_three(im_x, im_y, p, im_init, neg, radius, three, a, b, c, d, False))


def _dot_three(px: List[Ball], py: List[Ball], p: int, initial: Optional[Ball],
               neg: int, radius: bool, three: List[int], a, b, c, d,
               real: bool) -> Ball:
    """One part of a complex dot where some terms use exact three-product midpoints."""
    n = len(a)
    plan_x = px + [initial] if initial is not None else px
    plan_y = py + [BALL_ONE] if initial is not None else py
    plan = _setup(plan_x, plan_y, p, radius)
    if plan.status is not Status.PROCEED:
        return _dot_real(px, py, p, initial, neg, radius, True, True)
    special = set(three)
    keep = [i for i in range(n) if i not in special]
    mid_idx = keep + [n + i for i in keep]
    s, err, srad = _eval_packed(plan, [px[i] for i in mid_idx],
                                [py[i] for i in mid_idx], neg, True, False, True)
    if radius:
        _, _, srad = _eval_packed(plan, px, py, neg, False, True, True)
    if initial is not None:
        s2, err2, srad2 = _eval_packed(plan, [initial], [BALL_ONE], 0, True,
                                       radius, True)
        s += s2
        err += err2
        srad += srad2
    for i in three:
        am, bm, cm, dm = a[i].mid, b[i].mid, c[i].mid, d[i].mid
        va, ka = _signed(am)
        vb, kb = _signed(bm)
        vc, kc = _signed(cm)
        vd, kd = _signed(dm)
        kab = min(ka, kb)
        kcd = min(kc, kd)
        ac = va * vc
        bd = vb * vd
        if real:
            # ac - bd at scale 2**(ka+kc) and 2**(kb+kd); add separately
            parts = [(ac, ka + kc, am.exp + cm.exp), (-bd, kb + kd, bm.exp + dm.exp)]
        else:
            full = ((va << (ka - kab)) + (vb << (kb - kab))) * \
                   ((vc << (kc - kcd)) + (vd << (kd - kcd)))
            k = kab + kcd
            imag = full - (ac << (ka + kc - k)) - (bd << (kb + kd - k))
            top = max(am.exp + dm.exp, bm.exp + cm.exp) + 1
            parts = [(imag, k, top)]
        for v, k, top in parts:
            if neg:
                v = -v
            contrib, inc = _add_product_packed(plan, 1 if v < 0 else 0, abs(v),
                                               k, top)
            s += contrib
            err += inc
    sign = 1 if s < 0 else 0
    return _finalize_int(plan, sign, abs(s), err, srad, plan.p_eff, radius)


def dot_complex_ball(x: Sequence[ComplexBall], y: Sequence[ComplexBall],
                     prec: int, *, n: Optional[int] = None, xstart: int = 0,
                     xstep: int = 1, ystart: int = 0, ystep: int = 1,
                     initial: Optional[ComplexBall] = None,
                     subtract: bool = False, fast: bool = True,
                     three_mul_limbs: int = COMPLEX_THREE_MUL_LIMBS) -> ComplexBall:
    """Complex ball dot product, each part one fused length-``2n`` real dot.

    Terms whose four midpoint parts all have at least ``three_mul_limbs``
    limbs (and comparable magnitudes) form their midpoint products with three
    exact multiplications instead of four.
    """
    n = _resolve_n(n, x, y, xstep, ystep)
    xs = _gather(x, n, xstart, xstep)
    ys = _gather(y, n, ystart, ystep)
    return _dot_complex(xs, ys, prec, initial, 1 if subtract else 0, True,
                        fast, three_mul_limbs)


def dot_complex_approx(x: Sequence[ComplexBall], y: Sequence[ComplexBall],
                       prec: int, *, n: Optional[int] = None, xstart: int = 0,
                       xstep: int = 1, ystart: int = 0, ystep: int = 1,
                       initial: Optional[ComplexBall] = None,
                       subtract: bool = False, fast: bool = True,
                       three_mul_limbs: int = COMPLEX_THREE_MUL_LIMBS
                       ) -> Tuple[ApFloat, ApFloat]:
    n = _resolve_n(n, x, y, xstep, ystep)
    xs = _gather(x, n, xstart, xstep)
    ys = _gather(y, n, ystart, ystep)
    z = _dot_complex(xs, ys, prec, initial, 1 if subtract else 0, False, fast,
                     three_mul_limbs)
    return z.re.mid, z.im.mid


def dot_complex_naive(x: Sequence[ComplexBall], y: Sequence[ComplexBall],
                      prec: int) -> ComplexBall:
    re = im = BALL_ZERO
    for u, v in zip(x, y):
        re = ball_fallback_addmul(re, u.re, v.re, prec)
        re = ball_fallback_addmul(re, u.im, -v.im, prec)
        im = ball_fallback_addmul(im, u.re, v.im, prec)
        im = ball_fallback_addmul(im, u.im, v.re, prec)
    return ComplexBall(re, im)
