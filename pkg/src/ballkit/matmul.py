"""Ball matrix multiplication.

``classical_matmul_ball`` evaluates one fused dot product per entry.
``block_matmul_ball`` instead splits the inner dimension into blocks whose
rows (of A) and columns (of B) can be scaled to integers of bounded height,
multiplies those exactly and rounds once per entry and block.  Radius
products are bounded separately with binary64 matrix products.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dot import dot_ball
from .intmat import IntMatrix, int_matmul, int_matmul_array
from .numbers import (FINITE, MAG_INF, MAG_ZERO, ZERO, ApFloat, Ball, ComplexBall, Mag,
                      ball_add, ball_add_man_exp, ball_sub, format_ball,
                      mag_add_up, mag_upper_from_apfloat, parse_ball)

__all__ = [
    "BallMatrix", "ComplexBallMatrix", "BlockStep", "IntMatrix",
    "classical_matmul_ball", "entry_precision", "plan_blocks", "scale_block",
    "int_matmul", "radius_matmul_upper", "block_matmul_ball",
    "complex_matmul_ball", "matmul_auto", "dispatch_cutoff", "DISPATCH_COUNTS",
]

BASECASE_LEN = 30
DOUBLE_HEIGHT = 900
DOUBLE_CENTER = 450
# (max precision, cutoff) pairs; the last entry catches everything else
CUTOFF_TABLE = ((128, 60), (512, 50), (None, 40))

DISPATCH_COUNTS: Counter = Counter()


# -- containers ----------------------------------------------------------------

@dataclass
class BallMatrix:
    rows: int
    cols: int
    entries: List[Ball]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match the shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Ball]]) -> "BallMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        return cls(r, c, [v for row in rows for v in row])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BallMatrix":
        return cls(rows, cols, [Ball.exact(0)] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "BallMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.entries[i * n + i] = Ball.exact(1)
        return m

    def __getitem__(self, ij) -> Ball:
        i, j = ij
        return self.entries[i * self.cols + j]

    def __setitem__(self, ij, v: Ball):
        i, j = ij
        self.entries[i * self.cols + j] = v

    def row(self, i: int) -> List[Ball]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> List[Ball]:
        return self.entries[j::self.cols]

    def to_rows(self) -> List[List[Ball]]:
        return [self.row(i) for i in range(self.rows)]

    def is_finite(self) -> bool:
        return all(b.is_finite() for b in self.entries)

    def to_text(self) -> str:
        lines = ["%d %d" % (self.rows, self.cols)]
        lines.extend(format_ball(b) for b in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BallMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("missing header")
        r, c = (int(v) for v in lines[0].split())
        if len(lines) - 1 != r * c:
            raise ValueError("expected %d entries, got %d" % (r * c, len(lines) - 1))
        return cls(r, c, [parse_ball(ln) for ln in lines[1:]])


@dataclass
class ComplexBallMatrix:
    re: BallMatrix
    im: BallMatrix

    def __post_init__(self):
        if (self.re.rows, self.re.cols) != (self.im.rows, self.im.cols):
            raise ValueError("real and imaginary parts differ in shape")

    @property
    def rows(self) -> int:
        return self.re.rows

    @property
    def cols(self) -> int:
        return self.re.cols

    @classmethod
    def from_real(cls, a: BallMatrix) -> "ComplexBallMatrix":
        return cls(a, BallMatrix.zeros(a.rows, a.cols))

    def __getitem__(self, ij) -> ComplexBall:
        return ComplexBall(self.re[ij], self.im[ij])


@dataclass
class BlockStep:
    """One slice ``start:stop`` of the inner dimension.

    ``row_exps[i]`` makes row ``i`` of the A-block integral with minimal
    height, ``col_exps[j]`` does the same for column ``j`` of the B-block.
    Basecase steps carry no scalings.
    """
    start: int
    stop: int
    basecase: bool
    row_exps: List[int] = field(default_factory=list)
    col_exps: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return self.stop - self.start


def _check(A: BallMatrix, B: BallMatrix):
    if A.cols != B.rows:
        raise ValueError("inner dimensions differ: %d vs %d" % (A.cols, B.rows))


# -- classical -------------------------------------------------------------------

def classical_matmul_ball(A: BallMatrix, B: BallMatrix, p: int) -> BallMatrix:
    """Every entry is one ``dot_ball`` over a row of A and a column of B."""
    _check(A, B)
    M, K, N = A.rows, A.cols, B.cols
    out = []
    for i in range(M):
        row = A.entries[i * K:(i + 1) * K]
        for k in range(N):
            out.append(dot_ball(row, B.entries, p, n=K, ystart=k, ystep=N))
    return BallMatrix(M, N, out)


# -- planning ----------------------------------------------------------------------

def _window(x: ApFloat) -> Optional[Tuple[int, int]]:
    """``(top, bottom)`` with ``2**bottom | x`` and ``|x| < 2**top``."""
    if x.kind is not FINITE:
        return None
    return x.exp, x.exp - x.bits


def entry_precision(A: BallMatrix) -> int:
    """Bits needed to hold every finite midpoint exactly (0 for a zero matrix)."""
    return max((b.mid.bits for b in A.entries), default=0)


def height_bound(p: int, pa: int, pb: int) -> int:
    return (5 * min(p, max(pa, pb))) // 4 + 192


def _greedy(K: int, a_cols: List[list], b_rows: List[list], h: int, start: int):
    """Longest prefix of ``start..K-1`` keeping every window within ``h``.

    ``a_cols[j]`` lists ``(row, top, bottom)`` for the nonzero entries of
    column ``j`` of A (similarly for B).  Returns ``(stop, tops_a, bots_a,
    tops_b, bots_b)`` with the committed windows.
    """
    ta: Dict[int, int] = {}
    ba: Dict[int, int] = {}
    tb: Dict[int, int] = {}
    bb: Dict[int, int] = {}
    j = start
    while j < K:
        ok = True
        for tops, bots, ents in ((ta, ba, a_cols[j]), (tb, bb, b_rows[j])):
            for r, t, b in ents:
                ot = tops.get(r)
                nt, nbt = (t, b) if ot is None else (max(ot, t), min(bots[r], b))
                if nt - nbt > h:
                    ok = False
                    break
            if not ok:
                break
        if not ok and j > start:
            break
        for tops, bots, ents in ((ta, ba, a_cols[j]), (tb, bb, b_rows[j])):
            for r, t, b in ents:
                ot = tops.get(r)
                if ot is None:
                    tops[r], bots[r] = t, b
                else:
                    tops[r] = max(ot, t)
                    bots[r] = min(bots[r], b)
        j += 1
        if not ok:
            break           # a single index already exceeds h
    return j, ta, ba, tb, bb


def plan_blocks(A: BallMatrix, B: BallMatrix, p: int) -> List[BlockStep]:
    """Greedy partition of the inner indices into scaled blocks."""
    _check(A, B)
    M, K, N = A.rows, A.cols, B.cols
    h = height_bound(p, entry_precision(A), entry_precision(B))
    a_cols = [[] for _ in range(K)]
    for i in range(M):
        for j in range(K):
            w = _window(A.entries[i * K + j].mid)
            if w is not None:
                a_cols[j].append((i, w[0], w[1]))
    b_rows = [[] for _ in range(K)]
    for j in range(K):
        for k in range(N):
            w = _window(B.entries[j * N + k].mid)
            if w is not None:
                b_rows[j].append((k, w[0], w[1]))
    steps = []
    start = 0
    while start < K:
        stop, ta, ba, tb, bb = _greedy(K, a_cols, b_rows, h, start)
        if stop - start < BASECASE_LEN:
            stop = min(start + BASECASE_LEN, K)
            steps.append(BlockStep(start, stop, True))
        else:
            steps.append(BlockStep(start, stop, False,
                                   [-ba.get(i, 0) for i in range(M)],
                                   [-bb.get(k, 0) for k in range(N)]))
        start = stop
    return steps


def _scaled_int(x: ApFloat, e: int) -> int:
    if x.kind is not FINITE:
        return 0
    s, m, k = x.man_exp()
    k += e
    v = m << k if k >= 0 else m >> -k
    return -v if s else v


def scale_block(mids: Sequence[Sequence[ApFloat]], by: str = "rows"
                ) -> Tuple[IntMatrix, List[int]]:
    """Scale each row (``by="rows"``) or column (``by="cols"``) to integers.

    The exponent for a line is the smallest ``e`` making ``2**e * line``
    integral; zero lines get ``e = 0``.  No value changes.
    """
    if by not in ("rows", "cols"):
        raise ValueError("by must be 'rows' or 'cols'")
    rows = [list(r) for r in mids]
    lines = rows if by == "rows" else [list(c) for c in zip(*rows)]
    exps = []
    out = []
    for line in lines:
        bots = [w[1] for w in map(_window, line) if w is not None]
        e = -min(bots) if bots else 0
        exps.append(e)
        out.append([_scaled_int(x, e) for x in line])
    if by == "cols":
        out = [list(r) for r in zip(*out)] if out else [[] for _ in rows]
    return IntMatrix.from_rows(out) if out else IntMatrix(0, 0, []), exps


def _split(n: int, size: int) -> List[Tuple[int, int]]:
    parts = max(1, -(-n // size))
    cuts = [n * t // parts for t in range(parts + 1)]
    return list(zip(cuts[:-1], cuts[1:]))


def _square_tiles(a: np.ndarray, b: np.ndarray, algo: str) -> np.ndarray:
    """Integer product computed over sub-blocks within a factor 2 of square."""
    m, k = a.shape
    n = b.shape[1]
    size = 2 * min(m, k, n)
    out = np.zeros((m, n), dtype=object) + 0
    for r0, r1 in _split(m, size):
        for c0, c1 in _split(n, size):
            for k0, k1 in _split(k, size):
                out[r0:r1, c0:c1] += int_matmul_array(a[r0:r1, k0:k1],
                                                      b[k0:k1, c0:c1], algo)
    return out


# -- radius products in binary64 --------------------------------------------------

def _inflation(k: int) -> float:
    """Factor covering binary64 round-to-nearest error of a length-``k`` sum.

    Any summation order has relative error below ``(1 + 2**-53)**k - 1``,
    which the second expression dominates; the first is the looser per-level
    bound for tree-shaped summation.
    """
    levels = max(1, k - 1).bit_length() + 1
    f = max((1 + 2.0 ** -45) ** levels, 1 + (k + 2) * 2.0 ** -52)
    return float(np.nextafter(f, np.inf))


def _mag_windows(P: Sequence[Sequence[Mag]], by_rows: bool):
    """Per inner index, ``(line, exponent)`` for nonzero entries."""
    rows = len(P)
    cols = len(P[0]) if rows else 0
    inner = cols if by_rows else rows
    out = [[] for _ in range(inner)]
    for i in range(rows):
        for j in range(cols):
            m = P[i][j]
            if m.kind is ZERO:
                continue
            if by_rows:
                out[j].append((i, m.f, m.f))
            else:
                out[i].append((j, m.f, m.f))
    return out


def radius_matmul_upper(P: Sequence[Sequence[Mag]], Q: Sequence[Sequence[Mag]]
                        ) -> List[List[Mag]]:
    """Entrywise upper bound for the product of nonnegative Mag matrices."""
    M = len(P)
    K = len(P[0]) if M else len(Q)
    N = len(Q[0]) if Q else 0
    if len(Q) != K:
        raise ValueError("inner dimensions differ")
    out = [[MAG_ZERO] * N for _ in range(M)]
    if any(not m.is_finite() for row in P for m in row) or \
            any(not m.is_finite() for row in Q for m in row):
        return [[MAG_INF] * N for _ in range(M)]
    p_cols = _mag_windows(P, True)
    q_rows = _mag_windows(Q, False)
    start = 0
    while start < K:
        stop, tp, _, tq, _ = _greedy(K, p_cols, q_rows, DOUBLE_HEIGHT, start)
        if tp and tq:
            rs = [tp.get(i, 0) - DOUBLE_CENTER for i in range(M)]
            cs = [tq.get(k, 0) - DOUBLE_CENTER for k in range(N)]
            a = np.zeros((M, stop - start))
            b = np.zeros((stop - start, N))
            for j in range(start, stop):
                for i, f, _ in p_cols[j]:
                    a[i, j - start] = math.ldexp(P[i][j].b, f - 30 - rs[i])
                for k, f, _ in q_rows[j]:
                    b[j - start, k] = math.ldexp(Q[j][k].b, f - 30 - cs[k])
            z = np.nextafter((a @ b) * _inflation(stop - start), np.inf)
            rows_nz = sorted(tp)
            cols_nz = sorted(tq)
            for i in rows_nz:
                zi = z[i]
                oi = out[i]
                for k in cols_nz:
                    v = float(zi[k])
                    if v > 0.0:
                        oi[k] = mag_add_up(oi[k], Mag.from_float(v).mul_2exp(rs[i] + cs[k]))
        start = stop
    return out


# -- block product -------------------------------------------------------------------

def block_matmul_ball(A: BallMatrix, B: BallMatrix, p: int, *, algo: str = "auto",
                      info: Optional[dict] = None) -> BallMatrix:
    """Ball product via scaled integer blocks.

    ``algo`` selects the integer product (see :func:`int_matmul`).  When
    ``info`` is a dict it receives ``blocks`` (number of steps) and
    ``basecase_blocks``.
    """
    _check(A, B)
    M, K, N = A.rows, A.cols, B.cols
    if not (A.is_finite() and B.is_finite()):
        if info is not None:
            info.update(blocks=0, basecase_blocks=0)
        return classical_matmul_ball(A, B, p)
    C = [Ball.exact(0)] * (M * N)
    steps = plan_blocks(A, B, p)
    a_mid = [Ball(x.mid) for x in A.entries]
    b_mid = [Ball(x.mid) for x in B.entries]
    for st in steps:
        if st.basecase:
            L = len(st)
            for i in range(M):
                row = a_mid[i * K + st.start:i * K + st.stop]
                for k in range(N):
                    c = C[i * N + k]
                    r = dot_ball(row, b_mid, p, n=L, ystart=st.start * N + k,
                                 ystep=N, initial=Ball(c.mid))
                    C[i * N + k] = Ball(r.mid, mag_add_up(c.rad, r.rad))
            continue
        a_int = np.empty((M, len(st)), dtype=object)
        for i in range(M):
            e = st.row_exps[i]
            for j in range(st.start, st.stop):
                a_int[i, j - st.start] = _scaled_int(A.entries[i * K + j].mid, e)
        b_int = np.empty((len(st), N), dtype=object)
        for j in range(st.start, st.stop):
            for k in range(N):
                b_int[j - st.start, k] = _scaled_int(B.entries[j * N + k].mid,
                                                     st.col_exps[k])
        T = _square_tiles(a_int, b_int, algo)
        for i in range(M):
            e = st.row_exps[i]
            Ti = T[i]
            for k in range(N):
                t = Ti[k]
                if t:
                    idx = i * N + k
                    C[idx] = ball_add_man_exp(C[idx], 1 if t < 0 else 0, abs(t),
                                              -e - st.col_exps[k], p)
    if info is not None:
        info.update(blocks=len(steps),
                    basecase_blocks=sum(1 for s in steps if s.basecase))
    _add_radius_products(C, A, B)
    return BallMatrix(M, N, C)


def _add_radius_products(C: List[Ball], A: BallMatrix, B: BallMatrix) -> None:
    M, K, N = A.rows, A.cols, B.cols
    ra = [[A.entries[i * K + j].rad for j in range(K)] for i in range(M)]
    rb = [[B.entries[j * N + k].rad for k in range(N)] for j in range(K)]
    a_zero = all(r.kind is ZERO for row in ra for r in row)
    b_zero = all(r.kind is ZERO for row in rb for r in row)
    terms = []
    if not b_zero:
        abs_a = [[mag_upper_from_apfloat(A.entries[i * K + j].mid) for j in range(K)]
                 for i in range(M)]
        terms.append(radius_matmul_upper(abs_a, rb))
    if not a_zero:
        abs_b = [[mag_add_up(mag_upper_from_apfloat(B.entries[j * N + k].mid),
                             rb[j][k]) for k in range(N)] for j in range(K)]
        terms.append(radius_matmul_upper(ra, abs_b))
    for R in terms:
        for i in range(M):
            Ri = R[i]
            for k in range(N):
                if Ri[k].kind is not ZERO:
                    c = C[i * N + k]
                    C[i * N + k] = Ball(c.mid, mag_add_up(c.rad, Ri[k]))


# -- dispatch ------------------------------------------------------------------------

def dispatch_cutoff(p: int) -> int:
    for limit, cut in CUTOFF_TABLE:
        if limit is None or p <= limit:
            return cut
    return CUTOFF_TABLE[-1][1]


def matmul_auto(A: BallMatrix, B: BallMatrix, p: int) -> BallMatrix:
    """Classical product for small matrices, block product otherwise.

    Each call increments ``DISPATCH_COUNTS["classical"]`` or
    ``DISPATCH_COUNTS["block"]``.
    """
    _check(A, B)
    if min(A.rows, A.cols, B.cols) <= dispatch_cutoff(p):
        DISPATCH_COUNTS["classical"] += 1
        return classical_matmul_ball(A, B, p)
    DISPATCH_COUNTS["block"] += 1
    return block_matmul_ball(A, B, p)


def complex_matmul_ball(A: ComplexBallMatrix, B: ComplexBallMatrix, p: int
                        ) -> ComplexBallMatrix:
    """``(X + Yi)(Z + Wi)`` from four real products."""
    if A.cols != B.rows:
        raise ValueError("inner dimensions differ: %d vs %d" % (A.cols, B.rows))
    xz = matmul_auto(A.re, B.re, p)
    yw = matmul_auto(A.im, B.im, p)
    xw = matmul_auto(A.re, B.im, p)
    yz = matmul_auto(A.im, B.re, p)
    re = [ball_sub(u, v, p) for u, v in zip(xz.entries, yw.entries)]
    im = [ball_add(u, v, p) for u, v in zip(xw.entries, yz.entries)]
    return ComplexBallMatrix(BallMatrix(xz.rows, xz.cols, re),
                             BallMatrix(xz.rows, xz.cols, im))
