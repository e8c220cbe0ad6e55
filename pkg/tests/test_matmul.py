import math
import random
from fractions import Fraction

import pytest
import sympy

from ballkit._primes import PRIMES_62
from ballkit.intmat import IntMatrix, int_matmul, primes_for_bound
from ballkit.matmul import (DISPATCH_COUNTS, BallMatrix, ComplexBallMatrix,
                            block_matmul_ball, classical_matmul_ball,
                            complex_matmul_ball, dispatch_cutoff,
                            entry_precision, matmul_auto, plan_blocks,
                            radius_matmul_upper, scale_block)
from ballkit.numbers import (MAG_ZERO, ApFloat, Ball, Mag, ZERO)
from ballkit.dot import dot_ball, dot_complex_ball
from ballkit.oracle import (apfloat_to_fraction, ball_contains,
                            ball_contains_interval, interval_matmul_hull,
                            mag_to_fraction, rational_matmul_exact)
from ballkit.profiles import pascal_matrix, uniform_matrix

from conftest import rand_apfloat, rand_ball


def _rand_matrix(rng, r, c, bits=80, lo=-30, hi=30, p_exact=0.4):
    return BallMatrix(r, c, [rand_ball(rng, bits, lo, hi, p_exact=p_exact)
                             for _ in range(r * c)])


def _contains_all(C, A, B):
    H = interval_matmul_hull(A.to_rows(), B.to_rows())
    return all(ball_contains_interval(C[i, k], H[i][k])
               for i in range(C.rows) for k in range(C.cols))


# -- containers -----------------------------------------------------------------

def test_text_roundtrip(rng):
    A = _rand_matrix(rng, 3, 4)
    assert BallMatrix.from_text(A.to_text()) == A
    assert A.to_text().splitlines()[0] == "3 4"
    with pytest.raises(ValueError):
        BallMatrix.from_text("2 2\n0 +/- 0\n")


def test_shape_validation():
    with pytest.raises(ValueError):
        BallMatrix(2, 2, [Ball.exact(1)])
    A = BallMatrix.zeros(2, 3)
    with pytest.raises(ValueError):
        classical_matmul_ball(A, A, 53)
    with pytest.raises(ValueError):
        block_matmul_ball(A, A, 53)


# -- classical -------------------------------------------------------------------

def test_classical_identity(rng):
    A = _rand_matrix(rng, 4, 4, bits=40, p_exact=1.0)
    assert classical_matmul_ball(BallMatrix.identity(4), A, 64) == A


def test_classical_identity_inexact_radii_round_up(rng):
    # radii pass through 30-bit upward rounding, so only mids are bit-equal
    A = _rand_matrix(rng, 4, 4, bits=40, p_exact=0.0)
    C = classical_matmul_ball(BallMatrix.identity(4), A, 64)
    for c, a in zip(C.entries, A.entries):
        assert c.mid == a.mid
        ra = mag_to_fraction(a.rad)
        assert ra <= mag_to_fraction(c.rad) <= ra * (1 + Fraction(1, 2 ** 26))


def test_classical_one_by_one():
    x, y = Ball.exact(3), Ball(ApFloat.from_float(0.5), Mag.from_int_exp(1, -20))
    C = classical_matmul_ball(BallMatrix(1, 1, [x]), BallMatrix(1, 1, [y]), 53)
    assert C[0, 0] == dot_ball([x], [y], 53)


def test_classical_contains(rng):
    A, B = _rand_matrix(rng, 6, 5), _rand_matrix(rng, 5, 4)
    assert _contains_all(classical_matmul_ball(A, B, 53), A, B)


# -- planning and scaling ------------------------------------------------------------

def test_entry_precision():
    ones = BallMatrix(2, 2, [Ball.exact(v) for v in (1, -1, 1, 1)])
    assert entry_precision(ones) == 1
    one = BallMatrix(1, 1, [Ball(ApFloat.from_man_exp(0, 3, -5))])
    assert entry_precision(one) == 2
    assert entry_precision(BallMatrix.zeros(3, 3)) == 0


def test_entry_precision_random(rng):
    for _ in range(50):
        A = _rand_matrix(rng, 3, 3, bits=200, p_exact=1.0)
        want = 0
        for b in A.entries:
            q = abs(apfloat_to_fraction(b.mid))
            if q:
                num, den = q.numerator, q.denominator
                # odd part of the numerator carries the significant bits
                want = max(want, (num // (num & -num)).bit_length())
        assert entry_precision(A) == want


def test_scale_block_example():
    row = [ApFloat.from_man_exp(0, 3, -5), ApFloat.from_man_exp(0, 5, 7)]
    ints, exps = scale_block([row])
    assert exps == [5]
    assert ints.to_rows() == [[3, 5 << 12]]
    assert ints.height() == 15


def test_scale_block_zero_row_and_columns():
    z = ApFloat.from_int(0)
    ints, exps = scale_block([[z, z]])
    assert exps == [0] and ints.to_rows() == [[0, 0]]
    col = [[ApFloat.from_man_exp(1, 1, -3)], [ApFloat.from_int(2)]]
    ints, exps = scale_block(col, by="cols")
    assert exps == [3] and ints.to_rows() == [[-1], [16]]


def test_scale_block_roundtrip(rng):
    for _ in range(100):
        rows = [[rand_apfloat(rng, rng.randint(1, 150), -100, 100) for _ in range(5)]
                for _ in range(3)]
        ints, exps = scale_block(rows)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                assert Fraction(ints[i, j], 1) / Fraction(2) ** exps[i] == \
                    apfloat_to_fraction(x)
            assert any(v % 2 for v in ints.to_rows()[i])


def test_plan_uniform_single_block(rng):
    A, B = uniform_matrix(40, 40, 128, rng), uniform_matrix(40, 40, 128, rng)
    plan = plan_blocks(A, B, 128)
    assert len(plan) == 1 and not plan[0].basecase


def test_plan_short_inner_is_basecase(rng):
    A, B = uniform_matrix(3, 10, 64, rng), uniform_matrix(10, 3, 64, rng)
    plan = plan_blocks(A, B, 64)
    assert [(s.start, s.stop, s.basecase) for s in plan] == [(0, 10, True)]


def test_plan_pascal_splits_at_300():
    P = pascal_matrix(300, 53)
    plan = plan_blocks(P, P, 53)
    assert len(plan) > 1


def test_plan_partitions_and_respects_height(rng):
    for _ in range(30):
        K = rng.randint(1, 90)
        # wide exponent drift along the inner index forces splits
        A = BallMatrix(4, K, [Ball(rand_apfloat(rng, 60, 8 * j, 8 * j + 3))
                              for i in range(4) for j in range(K)])
        B = BallMatrix(K, 3, [Ball(rand_apfloat(rng, 60, -5, 5))
                              for _ in range(K * 3)])
        plan = plan_blocks(A, B, 64)
        assert plan[0].start == 0 and plan[-1].stop == K
        assert all(a.stop == b.start for a, b in zip(plan, plan[1:]))
        h = (5 * 60) // 4 + 192
        for st in plan:
            if st.basecase:
                continue
            rows = [[A[i, j].mid for j in range(st.start, st.stop)] for i in range(4)]
            ints, exps = scale_block(rows)
            assert exps == st.row_exps
            assert ints.height() <= h


# -- integer products ----------------------------------------------------------------

def test_primes_table():
    assert len(set(PRIMES_62)) == len(PRIMES_62)
    assert all(p < 2 ** 62 and sympy.isprime(p) for p in PRIMES_62)
    assert list(PRIMES_62) == sorted(PRIMES_62, reverse=True)
    ps = primes_for_bound(300)
    assert math.prod(ps) > 2 ** 301 and math.prod(ps[:-1]) <= 2 ** 301


def test_int_identity_and_scalar(rng):
    A = IntMatrix.from_rows([[rng.getrandbits(100) - 2 ** 99 for _ in range(9)]
                             for _ in range(9)])
    I = IntMatrix.from_rows([[int(i == j) for j in range(9)] for i in range(9)])
    for algo in ("classical", "multimodular"):
        assert int_matmul(I, A, algo) == A
    x, y = rng.getrandbits(256), -rng.getrandbits(256)
    assert int_matmul([[x]], [[y]], "multimodular").entries == [x * y]


def test_multimodular_matches_classical(rng):
    for _ in range(150):
        m, k, n = (rng.randint(1, 12) for _ in range(3))
        bits = rng.randint(1, 300)
        A = [[rng.getrandbits(bits) * rng.choice((-1, 1)) for _ in range(k)] for _ in range(m)]
        B = [[rng.getrandbits(bits) * rng.choice((-1, 1)) for _ in range(n)] for _ in range(k)]
        assert int_matmul(A, B, "multimodular") == int_matmul(A, B, "classical")


def test_multimodular_extreme_entries():
    big = 2 ** 300 - 1
    A = [[big, -big], [-big, big]]
    assert int_matmul(A, A, "multimodular") == int_matmul(A, A, "classical")


def test_multimodular_long_inner_dimension(rng):
    A = [[rng.getrandbits(62) - 2 ** 61 for _ in range(2500)]]
    B = [[rng.getrandbits(62) - 2 ** 61] for _ in range(2500)]
    assert int_matmul(A, B, "multimodular") == int_matmul(A, B, "classical")


def test_int_matmul_agrees_with_rational_oracle(rng):
    A = [[rng.getrandbits(40) for _ in range(4)] for _ in range(3)]
    B = [[rng.getrandbits(40) for _ in range(2)] for _ in range(4)]
    exact = rational_matmul_exact(A, B)
    assert int_matmul(A, B).to_rows() == [[int(v) for v in row] for row in exact]


def test_int_matmul_dimension_error():
    with pytest.raises(ValueError):
        int_matmul([[1, 2]], [[1, 2]])


# -- radius products -------------------------------------------------------------------

def _mag_matrix(rng, r, c, lo, hi, p_zero=0.1):
    return [[MAG_ZERO if rng.random() < p_zero else
             Mag.from_int_exp(rng.getrandbits(30) | 1, rng.randint(lo, hi))
             for _ in range(c)] for _ in range(r)]


def _exact_product(P, Q):
    return [[sum((mag_to_fraction(P[i][j]) * mag_to_fraction(Q[j][k])
                  for j in range(len(Q))), Fraction(0))
             for k in range(len(Q[0]))] for i in range(len(P))]


def test_radius_zero_factor(rng):
    P = _mag_matrix(rng, 3, 3, -10, 10)
    Z = [[MAG_ZERO] * 3 for _ in range(3)]
    assert radius_matmul_upper(P, Z) == Z


def test_radius_one_by_one_tight(rng):
    for _ in range(200):
        P, Q = _mag_matrix(rng, 1, 1, -300, 300, 0), _mag_matrix(rng, 1, 1, -300, 300, 0)
        got = mag_to_fraction(radius_matmul_upper(P, Q)[0][0])
        exact = _exact_product(P, Q)[0][0]
        # the 30-bit Mag output itself costs up to 2**-29; allow 2**-40 before it
        limit = exact * (1 + Fraction(1, 2 ** 40))
        s = 2000
        limit_mag = Mag.from_int_exp(math.ceil(limit * 2 ** s), -s)
        assert exact <= got <= mag_to_fraction(limit_mag)


def test_radius_upper_bound_wide_exponents(rng):
    for _ in range(5):
        P = _mag_matrix(rng, 20, 20, -500, 500)
        Q = _mag_matrix(rng, 20, 20, -500, 500)
        R = radius_matmul_upper(P, Q)
        E = _exact_product(P, Q)
        for i in range(20):
            for k in range(20):
                assert mag_to_fraction(R[i][k]) >= E[i][k]


def test_radius_upper_bound_moderate(rng):
    for _ in range(20):
        P = _mag_matrix(rng, 6, 40, -1200, 1200)
        Q = _mag_matrix(rng, 40, 5, -60, 60)
        R = radius_matmul_upper(P, Q)
        E = _exact_product(P, Q)
        for i in range(6):
            for k in range(5):
                r = mag_to_fraction(R[i][k])
                assert E[i][k] <= r <= E[i][k] * (1 + Fraction(1, 2 ** 20)) or E[i][k] == 0


# -- block products ----------------------------------------------------------------

def test_block_exact_integers_exact_result(rng):
    A = BallMatrix(35, 35, [Ball(ApFloat.from_man_exp(0, rng.getrandbits(20), 7))
                            for _ in range(35 * 35)])
    B = BallMatrix(35, 35, [Ball(ApFloat.from_man_exp(1, rng.getrandbits(20), -3))
                            for _ in range(35 * 35)])
    info = {}
    C = block_matmul_ball(A, B, 200, info=info)
    assert info == {"blocks": 1, "basecase_blocks": 0}
    exact = rational_matmul_exact(A.to_rows(), B.to_rows())
    for i in range(35):
        for k in range(35):
            assert C[i, k].rad.kind is ZERO
            assert apfloat_to_fraction(C[i, k].mid) == exact[i][k]


def test_block_uniform_12_contains_and_tight(rng):
    A, B = uniform_matrix(12, 12, 128, rng), uniform_matrix(12, 12, 128, rng)
    C = block_matmul_ball(A, B, 128)
    D = classical_matmul_ball(A, B, 128)
    assert _contains_all(C, A, B)
    for c, d in zip(C.entries, D.entries):
        assert mag_to_fraction(c.rad) <= 16 * mag_to_fraction(d.rad)


def test_block_multi_block_contains(rng):
    for _ in range(6):
        K = rng.randint(31, 70)
        A = BallMatrix(5, K, [rand_ball(rng, 60, 6 * j, 6 * j + 4, p_zero=0.05)
                              for i in range(5) for j in range(K)])
        B = BallMatrix(K, 4, [rand_ball(rng, 60, -6 * j, -6 * j + 4, p_zero=0.05)
                              for j in range(K) for k in range(4)])
        info = {}
        C = block_matmul_ball(A, B, 64, info=info)
        assert info["blocks"] >= 1
        assert _contains_all(C, A, B)
        D = classical_matmul_ball(A, B, 64)
        for c, d in zip(C.entries, D.entries):
            gap = abs(apfloat_to_fraction(c.mid) - apfloat_to_fraction(d.mid))
            assert gap <= mag_to_fraction(c.rad) + mag_to_fraction(d.rad)


def test_block_algorithms_agree(rng):
    A, B = uniform_matrix(33, 31, 90, rng), uniform_matrix(31, 34, 90, rng)
    assert block_matmul_ball(A, B, 90, algo="classical") == \
        block_matmul_ball(A, B, 90, algo="multimodular")


def test_block_nonfinite_routes_to_classical():
    from ballkit.numbers import APF_NAN
    A = BallMatrix(1, 2, [Ball(APF_NAN), Ball.exact(1)])
    B = BallMatrix(2, 1, [Ball.exact(1), Ball.exact(1)])
    info = {}
    C = block_matmul_ball(A, B, 53, info=info)
    assert info["blocks"] == 0 and C[0, 0].mid.kind.name == "NAN"


def test_block_empty_inner():
    C = block_matmul_ball(BallMatrix(2, 0, []), BallMatrix(0, 3, []), 53)
    assert C == BallMatrix.zeros(2, 3)


# -- dispatch and complex ----------------------------------------------------------------

def test_cutoff_table_descends():
    cuts = [dispatch_cutoff(p) for p in (53, 128, 256, 1024, 4000)]
    assert cuts == sorted(cuts, reverse=True)
    assert 40 <= min(cuts) and max(cuts) <= 60


def test_auto_dispatch_counts(rng):
    DISPATCH_COUNTS.clear()
    A = uniform_matrix(2, 2, 64, rng)
    matmul_auto(A, A, 64)
    assert DISPATCH_COUNTS == {"classical": 1}
    A, B = uniform_matrix(70, 70, 64, rng), uniform_matrix(70, 70, 64, rng)
    C = matmul_auto(A, B, 64)
    assert DISPATCH_COUNTS["block"] == 1


def test_auto_both_paths_contain(rng):
    A, B = _rand_matrix(rng, 7, 65, bits=60), _rand_matrix(rng, 65, 3, bits=60)
    block = block_matmul_ball(A, B, 64)
    classical = classical_matmul_ball(A, B, 64)
    assert _contains_all(block, A, B) and _contains_all(classical, A, B)


def test_complex_real_inputs(rng):
    A = ComplexBallMatrix.from_real(_rand_matrix(rng, 3, 3))
    B = ComplexBallMatrix.from_real(_rand_matrix(rng, 3, 3))
    C = complex_matmul_ball(A, B, 64)
    assert all(b == Ball.exact(0) for b in C.im.entries)


def test_complex_times_i_rotates(rng):
    A = ComplexBallMatrix(_rand_matrix(rng, 3, 3, bits=40, p_exact=1.0),
                          _rand_matrix(rng, 3, 3, bits=40, p_exact=1.0))
    iI = ComplexBallMatrix(BallMatrix.zeros(3, 3), BallMatrix.identity(3))
    C = complex_matmul_ball(iI, A, 128)
    assert C.re == BallMatrix(3, 3, [-b for b in A.im.entries])
    assert C.im == A.re


def test_complex_one_by_one_matches_dot(rng):
    for _ in range(50):
        x = ComplexBallMatrix(_rand_matrix(rng, 1, 1), _rand_matrix(rng, 1, 1))
        y = ComplexBallMatrix(_rand_matrix(rng, 1, 1), _rand_matrix(rng, 1, 1))
        C = complex_matmul_ball(x, y, 53)
        z = dot_complex_ball([x[0, 0]], [y[0, 0]], 53)
        a, b = apfloat_to_fraction(x.re[0, 0].mid), apfloat_to_fraction(x.im[0, 0].mid)
        c, d = apfloat_to_fraction(y.re[0, 0].mid), apfloat_to_fraction(y.im[0, 0].mid)
        for got in (C[0, 0], z):
            assert ball_contains(got.re, a * c - b * d)
            assert ball_contains(got.im, a * d + b * c)
