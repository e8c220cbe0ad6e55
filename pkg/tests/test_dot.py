import random
from fractions import Fraction

import pytest

from ballkit.dot import (DotAccumulator, DotPlan, Status, bc, dot_accumulate_radius,
                         dot_accumulate_term, dot_approx, dot_ball,
                         dot_complex_approx, dot_complex_ball, dot_finalize,
                         dot_setup)
from ballkit.numbers import (APF_NAN, APF_POS_INF, MAG_ZERO, ApFloat, Ball,
                             ComplexBall, Kind, Mag, apfloat_round)
from ballkit.oracle import (apfloat_to_fraction, ball_contains,
                            ball_contains_interval, interval_dot_hull,
                            mag_to_fraction, rational_dot_exact)

from conftest import rand_apfloat, rand_ball

ONE = Ball.exact(1)


def _plan(**kw):
    base = dict(status=Status.PROCEED, p_eff=53, extend=2, padding=5)
    base.update(kw)
    return DotPlan(**base)


# -- setup ---------------------------------------------------------------

def test_setup_geometry_n100():
    rng = random.Random(1)
    terms = [(Ball(rand_apfloat(rng, 64, 0, 2)), Ball(rand_apfloat(rng, 64, 0, 2)))
             for _ in range(100)]
    plan = dot_setup(terms, 128)
    assert plan.status is Status.PROCEED
    assert plan.padding == 4 + bc(100) == 11
    assert plan.extend == bc(100) + 1 == 8
    assert plan.n_s == 3
    assert plan.e_s == plan.e_max + plan.extend


def test_setup_radius_reduces_precision():
    # |m m'| < 2**0 and radius terms < 2**-10
    x = Ball(ApFloat.from_float(0.75))
    y = Ball(ApFloat.from_float(0.75), Mag.from_int_exp(1, -11))
    plan = dot_setup([(x, y)], 1000)
    assert plan.e_max == 0 and plan.e_rad == -10
    assert plan.p_eff == 40


def test_setup_window_reduces_precision():
    # one-limb terms: e_min = e_max - 128, so p drops to 158 once tracked
    x = Ball(ApFloat.from_int(3))
    plan = dot_setup([(x, x)], 1000)
    assert plan.p_eff == 128 + 30
    assert dot_setup([(x, x)], 100).p_eff == 100   # not tracked for p <= 128


def test_setup_zero_and_fallback():
    z = Ball.exact(0)
    assert dot_setup([(z, ONE), (ONE, z)], 53).status is Status.ZERO_RESULT
    assert dot_setup([(Ball(APF_NAN), ONE)], 53).status is Status.FALLBACK
    huge = Ball(ApFloat.from_man_exp(0, 1, 1 << 61))
    assert dot_setup([(huge, ONE)], 53).status is Status.FALLBACK


# -- accumulate / finalize ----------------------------------------------------

def test_accumulate_single_one():
    plan = _plan(e_s=10, n_s=2)
    acc = DotAccumulator.for_plan(plan)
    dot_accumulate_term(plan, acc, ApFloat.from_int(1), ApFloat.from_int(1))
    # 1 sits 10 - 2 = 8 bits below the top of a 128-bit window
    assert acc.s == [0, 1 << 54] and acc.err == 0
    assert dot_finalize(plan, acc) == ONE


def test_accumulate_below_window():
    plan = _plan(e_s=10, n_s=2)
    acc = DotAccumulator.for_plan(plan)
    tiny = ApFloat.from_man_exp(0, 1, -200)
    dot_accumulate_term(plan, acc, tiny, ApFloat.from_int(1))
    assert acc.s == [0, 0] and acc.err == 1


def test_accumulate_negative_term_finalizes_negative():
    plan = _plan(e_s=10, n_s=2)
    acc = DotAccumulator.for_plan(plan)
    dot_accumulate_term(plan, acc, ApFloat.from_int(3), ApFloat.from_int(1),
                        negate=True)
    assert acc.s[-1] >> 63 == 1
    out = dot_finalize(plan, acc)
    assert out == Ball.exact(-3)


def test_accumulate_radius_examples():
    acc = DotAccumulator([0, 0])
    dot_accumulate_radius(acc, MAG_ZERO, MAG_ZERO, 0)
    assert acc.srad == 0
    a = Mag(Kind.FINITE, 2 ** 29 + 1, 3)
    dot_accumulate_radius(acc, a, a, 6)
    assert acc.srad == 2 ** 28 + 2
    far = Mag(Kind.FINITE, 2 ** 29 + 1, -20)
    dot_accumulate_radius(acc, far, far, 0)
    assert acc.srad == 2 ** 28 + 3


def test_finalize_all_zero():
    plan = _plan(e_s=0, n_s=2)
    assert dot_finalize(plan, DotAccumulator.for_plan(plan)) == Ball.exact(0)


# -- whole dot products ------------------------------------------------------

def test_empty_with_initial():
    assert dot_ball([], [], 53, initial=Ball.exact(5)) == Ball.exact(5)
    assert dot_approx([], [], 53).kind is Kind.ZERO


def test_seven_ones():
    assert dot_ball([ONE] * 7, [ONE] * 7, 53) == Ball.exact(7)


def test_minus_one_times_one():
    assert dot_ball([Ball.exact(-1)], [ONE], 53) == Ball.exact(-1)


def test_nonfinite_routes_to_fallback():
    r = dot_ball([Ball(APF_NAN), ONE], [ONE, ONE], 53)
    assert r.mid.kind is Kind.NAN
    r = dot_ball([Ball(APF_POS_INF)], [ONE], 53)
    assert not r.rad.is_finite()


def test_strides_negative():
    xs = [Ball.exact(v) for v in (1, 2, 3, 4)]
    ys = [Ball.exact(v) for v in (10, 20, 30, 40)]
    # x reversed, y every other element: 4*10 + 3*30
    r = dot_ball(xs, ys, 53, n=2, xstart=3, xstep=-1, ystart=0, ystep=2)
    assert r == Ball.exact(130)
    with pytest.raises(IndexError):
        dot_ball(xs, ys, 53, n=5, xstart=3, xstep=-1)


def _random_terms(rng, n, p, exact=False):
    bits = p + 70
    xs = [rand_ball(rng, bits, -80, 80, p_exact=1.0 if exact else 0.5) for _ in range(n)]
    ys = [rand_ball(rng, bits, -80, 80, p_exact=1.0 if exact else 0.5) for _ in range(n)]
    return xs, ys


@pytest.mark.parametrize("p", [2, 8, 53, 64, 128, 129, 256, 1024, 2000])
def test_engines_bit_identical(p):
    rng = random.Random(p)
    for _ in range(150):
        n = rng.randint(0, 12)
        xs, ys = _random_terms(rng, n, p)
        init = rand_ball(rng, p + 20) if rng.random() < 0.5 else None
        sub = rng.random() < 0.5
        fast = dot_ball(xs, ys, p, initial=init, subtract=sub)
        slow = dot_ball(xs, ys, p, initial=init, subtract=sub, fast=False)
        assert fast == slow
        assert dot_approx(xs, ys, p, initial=init) == \
            dot_approx(xs, ys, p, initial=init, fast=False)


def test_engines_identical_with_mulhigh():
    rng = random.Random(77)
    for _ in range(40):
        p = rng.choice([1700, 2500, 4000])
        xs, ys = _random_terms(rng, rng.randint(1, 6), p)
        # long mantissas trigger the short product
        xs = [Ball(rand_apfloat(rng, p + 200, -5, 5), b.rad) for b in xs]
        ys = [Ball(rand_apfloat(rng, p + 200, -5, 5), b.rad) for b in ys]
        a = dot_ball(xs, ys, p)
        assert a == dot_ball(xs, ys, p, fast=False)
        assert ball_contains_interval(a, interval_dot_hull(xs, ys))
        b = dot_ball(xs, ys, p, mulhigh=False)
        assert ball_contains_interval(b, interval_dot_hull(xs, ys))


def test_subtract_equals_negated_y():
    rng = random.Random(5)
    for _ in range(300):
        p = rng.choice([8, 53, 128, 300])
        xs, ys = _random_terms(rng, rng.randint(0, 10), p)
        init = rand_ball(rng, 100) if rng.random() < 0.5 else None
        a = dot_ball(xs, ys, p, initial=init, subtract=True)
        b = dot_ball(xs, [-y for y in ys], p, initial=init)
        assert a == b


def test_containment_random():
    rng = random.Random(17)
    for _ in range(1500):
        p = rng.choice([2, 8, 53, 128, 256, 1024])
        xs, ys = _random_terms(rng, rng.randint(0, 20), p)
        init = rand_ball(rng, 100) if rng.random() < 0.3 else None
        r = dot_ball(xs, ys, p, initial=init)
        hull = interval_dot_hull(xs + ([init] if init else []),
                                 ys + ([ONE] if init else []))
        assert ball_contains_interval(r, hull)


def test_err_bounded_by_three_per_term():
    rng = random.Random(8)
    for _ in range(200):
        p = rng.choice([53, 256, 2000])
        xs, ys = _random_terms(rng, rng.randint(1, 15), p)
        xs = [Ball(b.mid) for b in xs]
        ys = [Ball(b.mid) for b in ys]
        plan = dot_setup(list(zip(xs, ys)), p)
        if plan.status is not Status.PROCEED:
            continue
        acc = DotAccumulator.for_plan(plan)
        last = 0
        for x, y in zip(xs, ys):
            if x.mid.kind is Kind.FINITE and y.mid.kind is Kind.FINITE:
                dot_accumulate_term(plan, acc, x.mid, y.mid,
                                    bool(x.mid.sign ^ y.mid.sign))
            assert acc.err >= last
            last = acc.err
        assert acc.err <= 3 * len(xs)


def test_precision_reduction_costs_at_most_factor_four():
    rng = random.Random(21)
    checked = 0
    for _ in range(400):
        p = rng.choice([256, 1024])
        n = rng.randint(1, 10)
        # wide radii make the reduced precision kick in
        xs = [Ball(rand_apfloat(rng, p + 70, -5, 5),
                   Mag.from_int_exp(rng.getrandbits(30) | 1, rng.randint(-120, -60)))
              for _ in range(n)]
        ys = [Ball(rand_apfloat(rng, p + 70, -5, 5)) for _ in range(n)]
        a = dot_ball(xs, ys, p)
        b = dot_ball(xs, ys, p, reduce_precision=False)
        hull = interval_dot_hull(xs, ys)
        assert ball_contains_interval(a, hull) and ball_contains_interval(b, hull)
        ra, rb = mag_to_fraction(a.rad), mag_to_fraction(b.rad)
        assert ra <= 4 * rb
        checked += ra != rb
    assert checked > 0


def test_approx_matches_ball_midpoint_when_exact():
    rng = random.Random(4)
    for _ in range(200):
        p = rng.choice([8, 53, 200])
        xs, ys = _random_terms(rng, rng.randint(0, 10), p, exact=True)
        assert dot_approx(xs, ys, p) == dot_ball(xs, ys, p).mid


def test_approx_decreasing_magnitudes():
    from ballkit.profiles import decreasing_terms
    p = 1024
    xs, ys = decreasing_terms(1000, p)
    got = apfloat_to_fraction(dot_approx(xs, ys, p))
    exact = rational_dot_exact(xs, ys)
    assert abs(got - exact) <= abs(exact) * Fraction(1, 2 ** (p - 12))


# -- complex -------------------------------------------------------------------

def test_complex_rotation():
    one = ComplexBall(ONE, Ball.exact(0))
    i = ComplexBall(Ball.exact(0), ONE)
    z = dot_complex_ball([one], [i], 53)
    assert z.re == Ball.exact(0) and z.im == ONE


def test_complex_real_inputs_have_exact_zero_imaginary():
    rng = random.Random(2)
    xs = [ComplexBall(rand_ball(rng, 60)) for _ in range(5)]
    ys = [ComplexBall(rand_ball(rng, 60)) for _ in range(5)]
    z = dot_complex_ball(xs, ys, 53)
    assert z.im == Ball.exact(0)


def test_complex_containment():
    rng = random.Random(9)
    for _ in range(300):
        p = rng.choice([8, 53, 128, 500])
        n = rng.randint(0, 8)
        xs = [ComplexBall(rand_ball(rng, p + 30), rand_ball(rng, p + 30)) for _ in range(n)]
        ys = [ComplexBall(rand_ball(rng, p + 30), rand_ball(rng, p + 30)) for _ in range(n)]
        z = dot_complex_ball(xs, ys, p)
        re = interval_dot_hull([u.re for u in xs] + [u.im for u in xs],
                               [v.re for v in ys] + [-v.im for v in ys])
        im = interval_dot_hull([u.re for u in xs] + [u.im for u in xs],
                               [v.im for v in ys] + [v.re for v in ys])
        assert ball_contains_interval(z.re, re)
        assert ball_contains_interval(z.im, im)
        zr, zi = dot_complex_approx(xs, ys, p)
        assert zr == dot_complex_ball([ComplexBall(Ball(u.re.mid), Ball(u.im.mid)) for u in xs],
                                      [ComplexBall(Ball(v.re.mid), Ball(v.im.mid)) for v in ys],
                                      p).re.mid


def test_complex_three_mult_matches_four_mult_on_exact_inputs():
    rng = random.Random(10)
    for _ in range(200):
        p = rng.choice([128, 600])
        n = rng.randint(1, 6)
        mk = lambda: Ball(rand_apfloat(rng, 100, -4, 4))
        xs = [ComplexBall(mk(), mk()) for _ in range(n)]
        ys = [ComplexBall(mk(), mk()) for _ in range(n)]
        three = dot_complex_ball(xs, ys, p, three_mul_limbs=0)
        four = dot_complex_ball(xs, ys, p, three_mul_limbs=10 ** 9)
        assert three == four


def test_complex_three_mult_still_contains_when_truncating():
    rng = random.Random(12)
    for _ in range(100):
        p = rng.choice([64, 200])
        mk = lambda: rand_ball(rng, 400, -30, 30, p_zero=0)
        xs = [ComplexBall(mk(), mk()) for _ in range(5)]
        ys = [ComplexBall(mk(), mk()) for _ in range(5)]
        z = dot_complex_ball(xs, ys, p, three_mul_limbs=0)
        im = interval_dot_hull([u.re for u in xs] + [u.im for u in xs],
                               [v.im for v in ys] + [v.re for v in ys])
        assert ball_contains_interval(z.im, im)
