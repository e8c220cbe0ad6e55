"""Seeded randomized verification against the exact rational oracle.

Each suite draws instances from a ``random.Random(seed)`` stream and runs a
fixed list of checks on them.  Any failure is reported together with a text
reproducer holding every input needed to rerun it.  Reports contain no
timings, so a fixed seed gives identical report text.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .dot import bc, dot_ball, dot_complex_ball
from .intmat import int_matmul
from .matmul import (BallMatrix, ComplexBallMatrix, block_matmul_ball,
                     classical_matmul_ball, complex_matmul_ball)
from .numbers import (ZERO, ApFloat, Ball, ComplexBall, Mag, format_ball,
                      parse_ball)
from .oracle import (RationalInterval, apfloat_to_fraction, ball_contains,
                     ball_contains_interval, ball_to_interval, interval_dot_hull,
                     interval_matmul_hull, mag_to_fraction, rational_dot_exact,
                     rational_exp_series)
from .poly import poly_mullow_classical, series_exp_basecase
from .profiles import uniform_matrix

SUITES = ("dot", "matmul", "poly", "all")
DOT_PRECISIONS = (8, 53, 128, 256, 1024)
SIZE_CAP_ENV = "BALLKIT_MAX_N"


def size_cap(default: int) -> int:
    """``default`` lowered to ``$BALLKIT_MAX_N`` when that is set."""
    raw = os.environ.get(SIZE_CAP_ENV)
    if not raw:
        return default
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError("%s must be an integer, got %r" % (SIZE_CAP_ENV, raw))
    return max(1, min(default, cap))


# -- random inputs --------------------------------------------------------------

def random_apfloat(rng: random.Random, bits: int, exp_lo: int, exp_hi: int) -> ApFloat:
    m = rng.getrandbits(bits) | 1
    return ApFloat.from_man_exp(rng.getrandbits(1), m, rng.randint(exp_lo, exp_hi) - bits)


def random_ball(rng: random.Random, bits: int, exp_lo: int, exp_hi: int,
                p_zero: float = 0.1, p_exact: float = 0.5) -> Ball:
    """Random ball; radii sit anywhere from far below the midpoint to above it."""
    if rng.random() < p_zero:
        mid = ApFloat.from_int(0)
    else:
        mid = random_apfloat(rng, rng.randint(1, bits), exp_lo, exp_hi)
    if rng.random() < p_exact:
        return Ball(mid)
    top = mid.exp if mid.kind.name == "FINITE" else exp_hi
    f = top - rng.randint(-2, bits + 40)
    return Ball(mid, Mag.from_int_exp(rng.getrandbits(30) | 1, f - 30))


@dataclass
class DotInstance:
    """A strided dot product plus power-of-two shifts for ``x`` and ``y``.

    The kernel sees ``x * 2**sx`` and ``y * 2**sy`` (and the initial value
    times ``2**(sx + sy)``), which places exponents far apart while the
    oracle works on the unshifted numbers.
    """
    p: int
    x: List[Ball]
    y: List[Ball]
    n: int
    xstart: int = 0
    xstep: int = 1
    ystart: int = 0
    ystep: int = 1
    initial: Optional[Ball] = None
    subtract: bool = False
    sx: int = 0
    sy: int = 0

    def terms(self) -> Tuple[List[Ball], List[Ball]]:
        xs = [self.x[self.xstart + i * self.xstep] for i in range(self.n)]
        ys = [self.y[self.ystart + i * self.ystep] for i in range(self.n)]
        return xs, ys

    def run(self, **kw) -> Ball:
        x = [b.mul_2exp(self.sx) for b in self.x]
        y = [b.mul_2exp(self.sy) for b in self.y]
        init = self.initial.mul_2exp(self.sx + self.sy) if self.initial else None
        r = dot_ball(x, y, self.p, n=self.n, xstart=self.xstart, xstep=self.xstep,
                     ystart=self.ystart, ystep=self.ystep, initial=init,
                     subtract=self.subtract, **kw)
        return r.mul_2exp(-self.sx - self.sy)

    def hull(self) -> RationalInterval:
        xs, ys = self.terms()
        h = interval_dot_hull(xs, ys)
        if self.subtract:
            h = -h
        if self.initial is not None:
            h = h + ball_to_interval(self.initial)
        return h

    def to_text(self) -> str:
        lines = ["dot p=%d n=%d xstart=%d xstep=%d ystart=%d ystep=%d subtract=%d sx=%d sy=%d"
                 % (self.p, self.n, self.xstart, self.xstep, self.ystart, self.ystep,
                    int(self.subtract), self.sx, self.sy)]
        lines.append("initial " + (format_ball(self.initial) if self.initial else "none"))
        lines.append("x %d" % len(self.x))
        lines.extend(format_ball(b) for b in self.x)
        lines.append("y %d" % len(self.y))
        lines.extend(format_ball(b) for b in self.y)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DotInstance":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = dict(kv.split("=") for kv in lines[0].split()[1:])
        init = lines[1].split(" ", 1)[1]
        nx = int(lines[2].split()[1])
        x = [parse_ball(ln) for ln in lines[3:3 + nx]]
        ny = int(lines[3 + nx].split()[1])
        y = [parse_ball(ln) for ln in lines[4 + nx:4 + nx + ny]]
        return cls(int(head["p"]), x, y, int(head["n"]), int(head["xstart"]),
                   int(head["xstep"]), int(head["ystart"]), int(head["ystep"]),
                   None if init == "none" else parse_ball(init),
                   bool(int(head["subtract"])), int(head["sx"]), int(head["sy"]))


def _strided_layout(rng: random.Random, n: int) -> Tuple[int, int, int]:
    """``(length, start, step)`` with every index in range."""
    step = rng.choice((1, 1, -1, 2, -2, 3, -3))
    span = (n - 1) * abs(step) + 1
    length = span + rng.randint(0, 3)
    lo = 0 if step > 0 else span - 1
    hi = length - span if step > 0 else length - 1
    return length, rng.randint(lo, hi), step


def random_dot_instance(rng: random.Random, n_max: int = 50,
                        precisions: Sequence[int] = DOT_PRECISIONS,
                        shift: int = 1 << 40, exact: bool = False) -> DotInstance:
    n = rng.randint(1, n_max)
    p = rng.choice(precisions)
    spread = rng.choice((4, 40, 300))
    bits = min(p + 70, 1200)
    lx, xstart, xstep = _strided_layout(rng, n)
    ly, ystart, ystep = _strided_layout(rng, n)
    p_exact = 1.0 if exact else 0.5
    x = [random_ball(rng, bits, -spread, spread, p_exact=p_exact) for _ in range(lx)]
    y = [random_ball(rng, bits, -spread, spread, p_exact=p_exact) for _ in range(ly)]
    init = None
    if not exact and rng.random() < 0.3:
        init = random_ball(rng, bits, -2 * spread, 2 * spread)
    return DotInstance(p, x, y, n, xstart, xstep, ystart, ystep, init,
                       rng.random() < 0.5, rng.randint(-shift, shift),
                       rng.randint(-shift, shift))


def random_small_dyadic_instance(rng: random.Random, n_max: int = 50
                                 ) -> Tuple[DotInstance, int]:
    """Exact short dyadics and a precision large enough to hold the sum.

    Returns the instance and the number of bits it needs: the span from the
    highest product bit (plus carries) down to the lowest product bit.
    """
    n = rng.randint(1, n_max)
    x = [Ball(random_apfloat(rng, rng.randint(1, 16), -20, 20)) for _ in range(n)]
    y = [Ball(random_apfloat(rng, rng.randint(1, 16), -20, 20)) for _ in range(n)]
    tops = [a.mid.exp + b.mid.exp for a, b in zip(x, y)]
    lows = [a.mid.exp - a.mid.bits + b.mid.exp - b.mid.bits for a, b in zip(x, y)]
    need = max(2, max(tops) - min(lows) + bc(n) + 1)
    inst = DotInstance(need + rng.randint(0, 64), x, y, n,
                       subtract=rng.random() < 0.5)
    return inst, need


# -- dot checks --------------------------------------------------------------------

def check_dot_containment(inst: DotInstance) -> Optional[str]:
    r = inst.run()
    if not ball_contains_interval(r, inst.hull()):
        return "result %s misses the exact hull" % format_ball(r)
    return None


def check_dot_engines(inst: DotInstance) -> Optional[str]:
    a = inst.run()
    b = inst.run(fast=False)
    if a != b:
        return "packed engine %s != limb engine %s" % (format_ball(a), format_ball(b))
    return None


def check_dot_exact(inst: DotInstance) -> Optional[str]:
    r = inst.run()
    xs, ys = inst.terms()
    exact = rational_dot_exact(xs, ys)
    if inst.subtract:
        exact = -exact
    if r.rad.kind is not ZERO:
        return "radius %s is not zero" % format_ball(r)
    if apfloat_to_fraction(r.mid) != exact:
        return "midpoint %s is not the exact value" % format_ball(r)
    return None


def accuracy_limit(inst: DotInstance) -> Fraction:
    xs, ys = inst.terms()
    total = sum((abs(apfloat_to_fraction(a.mid) * apfloat_to_fraction(b.mid))
                 for a, b in zip(xs, ys)), Fraction(0))
    return total * Fraction(2) ** (-inst.p + bc(inst.n) + 7)


def check_dot_accuracy(inst: DotInstance) -> Optional[str]:
    r = inst.run()
    if not ball_contains_interval(r, inst.hull()):
        return "result %s misses the exact value" % format_ball(r)
    if mag_to_fraction(r.rad) > accuracy_limit(inst):
        return "radius %s exceeds 2**(-p+bc(N)+7) * sum|x y|" % format_ball(r)
    return None


def exact_midpoints(inst: DotInstance) -> DotInstance:
    inst.x = [Ball(b.mid) for b in inst.x]
    inst.y = [Ball(b.mid) for b in inst.y]
    inst.initial = None
    return inst


# -- matmul checks -----------------------------------------------------------------

def _matrix_text(name: str, m: BallMatrix) -> str:
    return "%s\n%s" % (name, m.to_text())


def random_uniform_pair(rng: random.Random, n_max: int = 32,
                        precisions: Sequence[int] = (53, 128, 256)):
    n = rng.randint(1, n_max)
    p = rng.choice(precisions)
    bits = rng.choice(precisions)
    return p, uniform_matrix(n, n, bits, rng), uniform_matrix(n, n, bits, rng)


def check_block_accuracy(p: int, A: BallMatrix, B: BallMatrix) -> Optional[str]:
    C = block_matmul_ball(A, B, p)
    D = classical_matmul_ball(A, B, p)
    H = interval_matmul_hull(A.to_rows(), B.to_rows())
    for i in range(C.rows):
        for k in range(C.cols):
            c, d = C[i, k], D[i, k]
            if not ball_contains_interval(c, H[i][k]):
                return "block entry (%d,%d) misses the exact hull" % (i, k)
            if not ball_contains_interval(d, H[i][k]):
                return "classical entry (%d,%d) misses the exact hull" % (i, k)
            if mag_to_fraction(c.rad) > 16 * mag_to_fraction(d.rad):
                return "block radius at (%d,%d) exceeds 16x classical" % (i, k)
            gap = abs(apfloat_to_fraction(c.mid) - apfloat_to_fraction(d.mid))
            if gap > mag_to_fraction(c.rad) + mag_to_fraction(d.rad):
                return "midpoints at (%d,%d) differ by more than the radii" % (i, k)
    return None


def random_int_pair(rng: random.Random, dim_max: int = 40, bits_max: int = 300):
    m, k, n = (rng.randint(1, dim_max) for _ in range(3))
    bits = rng.randint(1, bits_max)
    A = [[rng.getrandbits(bits) * rng.choice((-1, 1)) for _ in range(k)] for _ in range(m)]
    B = [[rng.getrandbits(bits) * rng.choice((-1, 1)) for _ in range(n)] for _ in range(k)]
    return A, B


def check_multimodular(A, B) -> Optional[str]:
    if int_matmul(A, B, "multimodular") != int_matmul(A, B, "classical"):
        return "multimodular product differs from classical"
    return None


def check_complex_matmul(p: int, A: ComplexBallMatrix, B: ComplexBallMatrix
                         ) -> Optional[str]:
    C = complex_matmul_ball(A, B, p)
    ar, ai = A.re.to_rows(), A.im.to_rows()
    br, bi = B.re.to_rows(), B.im.to_rows()
    rr, ii = interval_matmul_hull(ar, br), interval_matmul_hull(ai, bi)
    ri, ir = interval_matmul_hull(ar, bi), interval_matmul_hull(ai, br)
    for i in range(C.rows):
        for k in range(C.cols):
            if not ball_contains_interval(C.re[i, k], rr[i][k] + -ii[i][k]):
                return "real part at (%d,%d) misses the exact hull" % (i, k)
            if not ball_contains_interval(C.im[i, k], ri[i][k] + ir[i][k]):
                return "imaginary part at (%d,%d) misses the exact hull" % (i, k)
    return None


# -- poly checks ------------------------------------------------------------------

def random_exp_input(rng: random.Random, length: int = 16) -> List[Ball]:
    return [Ball.exact(0)] + [Ball(random_apfloat(rng, rng.randint(1, 60), -8, 2))
                              for _ in range(length - 1)]


def check_series_exp(a: List[Ball], length: int, p: int) -> Optional[str]:
    got = series_exp_basecase(a, length, p)
    for k, (g, w) in enumerate(zip(got, rational_exp_series(a, length))):
        if not ball_contains(g, w):
            return "coefficient %d %s misses the exact value" % (k, format_ball(g))
    return None


def check_mullow(a: List[Ball], b: List[Ball], length: int, p: int) -> Optional[str]:
    got = poly_mullow_classical(a, b, length, p)
    for k, g in enumerate(got):
        pa = [a[i] for i in range(k + 1) if i < len(a) and k - i < len(b)]
        pb = [b[k - i] for i in range(k + 1) if i < len(a) and k - i < len(b)]
        if not ball_contains_interval(g, interval_dot_hull(pa, pb)):
            return "coefficient %d %s misses the exact hull" % (k, format_ball(g))
    return None


def _poly_text(name: str, a: Sequence[Ball]) -> str:
    return "%s %d\n" % (name, len(a)) + "".join(format_ball(b) + "\n" for b in a)


# -- suites ------------------------------------------------------------------------

@dataclass
class Failure:
    check: str
    trial: int
    detail: str
    reproducer: str


@dataclass
class VerifyReport:
    suite: str
    trials: int
    seed: int
    runs: Dict[str, int] = field(default_factory=dict)
    failures: List[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, check: str, trial: int, detail: Optional[str],
               reproducer: Callable[[], str]) -> None:
        self.runs[check] = self.runs.get(check, 0) + 1
        if detail is not None:
            self.failures.append(Failure(check, trial, detail, reproducer()))

    def text(self) -> str:
        out = ["verify suite=%s trials=%d seed=%d" % (self.suite, self.trials, self.seed)]
        for name in sorted(self.runs):
            bad = sum(1 for f in self.failures if f.check == name)
            out.append("  %-24s %6d run %6d failed" % (name, self.runs[name], bad))
        for f in self.failures:
            out.append("FAIL %s trial %d: %s" % (f.check, f.trial, f.detail))
            out.append("--- reproducer ---")
            out.append(f.reproducer.rstrip("\n"))
            out.append("--- end ---")
        out.append("result: %s" % ("PASS" if self.ok else "FAIL"))
        return "\n".join(out) + "\n"


def _dot_suite(rep: VerifyReport, rng: random.Random, trials: int) -> None:
    n_max = size_cap(50)
    for t in range(trials):
        inst = random_dot_instance(rng, n_max)
        rep.record("dot.containment", t, check_dot_containment(inst), inst.to_text)
        if t % 4 == 0:
            rep.record("dot.engines", t, check_dot_engines(inst), inst.to_text)
        ex, _ = random_small_dyadic_instance(rng, n_max)
        rep.record("dot.exact_zero_radius", t, check_dot_exact(ex), ex.to_text)
        acc = exact_midpoints(random_dot_instance(rng, n_max))
        rep.record("dot.accuracy_bound", t, check_dot_accuracy(acc), acc.to_text)


def _matmul_suite(rep: VerifyReport, rng: random.Random, trials: int) -> None:
    n_max = size_cap(32)
    for t in range(trials):
        p, A, B = random_uniform_pair(rng, min(n_max, 12))
        rep.record("matmul.block_accuracy", t, check_block_accuracy(p, A, B),
                   lambda: "p=%d\n" % p + _matrix_text("A", A) + _matrix_text("B", B))
        IA, IB = random_int_pair(rng, min(n_max, 40))
        rep.record("matmul.multimodular", t, check_multimodular(IA, IB),
                   lambda: "A=%r\nB=%r\n" % (IA, IB))
        if t % 4 == 0:
            n = rng.randint(1, min(n_max, 6))
            pc = rng.choice((53, 128))
            CA = ComplexBallMatrix(*(uniform_matrix(n, n, pc, rng) for _ in range(2)))
            CB = ComplexBallMatrix(*(uniform_matrix(n, n, pc, rng) for _ in range(2)))
            rep.record("matmul.complex", t, check_complex_matmul(pc, CA, CB),
                       lambda: "p=%d\n" % pc + "".join(
                           _matrix_text(nm, m) for nm, m in
                           (("Are", CA.re), ("Aim", CA.im), ("Bre", CB.re), ("Bim", CB.im))))


def _poly_suite(rep: VerifyReport, rng: random.Random, trials: int) -> None:
    length = min(16, size_cap(16))
    for t in range(trials):
        a = random_exp_input(rng, length)
        rep.record("poly.series_exp", t, check_series_exp(a, length, 128),
                   lambda: "len=%d p=128\n" % length + _poly_text("a", a))
        p = rng.choice((20, 53, 128))
        x = [random_ball(rng, 80, -20, 20) for _ in range(rng.randint(1, 8))]
        y = [random_ball(rng, 80, -20, 20) for _ in range(rng.randint(1, 8))]
        n = rng.randint(0, len(x) + len(y))
        rep.record("poly.mullow", t, check_mullow(x, y, n, p),
                   lambda: "len=%d p=%d\n" % (n, p) + _poly_text("a", x) + _poly_text("b", y))


_SUITE_FUNCS = {"dot": _dot_suite, "matmul": _matmul_suite, "poly": _poly_suite}


def run_verify(suite: str, trials: int, seed: int) -> VerifyReport:
    """Run one suite (or ``"all"``) deterministically under ``seed``."""
    if suite not in SUITES:
        raise ValueError("unknown suite %r (choose from %s)" % (suite, ", ".join(SUITES)))
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    rep = VerifyReport(suite, trials, seed)
    names = ("dot", "matmul", "poly") if suite == "all" else (suite,)
    for name in names:
        # one stream per suite, so "all" repeats the single-suite runs exactly
        _SUITE_FUNCS[name](rep, random.Random("%s:%d" % (name, seed)), trials)
    return rep
