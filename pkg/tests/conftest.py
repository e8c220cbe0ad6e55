import random

import pytest
from hypothesis import strategies as st

from ballkit.numbers import ApFloat, Ball, Mag


def rand_apfloat(rng: random.Random, bits: int, exp_lo: int = -40,
                 exp_hi: int = 40) -> ApFloat:
    m = rng.getrandbits(bits) | 1
    return ApFloat.from_man_exp(rng.getrandbits(1), m,
                                rng.randint(exp_lo, exp_hi) - bits)


def rand_mag(rng: random.Random, exp_lo: int, exp_hi: int) -> Mag:
    return Mag.from_int_exp(rng.getrandbits(30) | (1 << 29),
                            rng.randint(exp_lo, exp_hi) - 30)


def rand_ball(rng: random.Random, bits: int, exp_lo: int = -40,
              exp_hi: int = 40, p_zero: float = 0.1,
              p_exact: float = 0.4) -> Ball:
    if rng.random() < p_zero:
        mid = ApFloat.from_int(0)
    else:
        mid = rand_apfloat(rng, rng.randint(1, bits), exp_lo, exp_hi)
    if rng.random() < p_exact:
        return Ball(mid)
    lo = (mid.exp if mid.kind.name == "FINITE" else exp_lo) - bits - 20
    return Ball(mid, rand_mag(rng, lo, lo + 30))


@pytest.fixture
def rng():
    return random.Random(20240601)


@st.composite
def apfloats(draw, max_bits=300, exp_range=200):
    bits = draw(st.integers(1, max_bits))
    m = draw(st.integers(0, (1 << bits) - 1))
    sign = draw(st.integers(0, 1))
    k = draw(st.integers(-exp_range, exp_range))
    return ApFloat.from_man_exp(sign, m, k)


@st.composite
def mags(draw, exp_range=200):
    b = draw(st.integers(0, (1 << 30) - 1))
    return Mag.from_int_exp(b, draw(st.integers(-exp_range, exp_range)))


@st.composite
def balls(draw, max_bits=200, exp_range=100):
    return Ball(draw(apfloats(max_bits, exp_range)), draw(mags(exp_range)))
