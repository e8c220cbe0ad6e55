"""Exact integer matrices and their products.

Two product algorithms are offered.  ``classical`` hands object arrays of
Python integers to numpy.  ``multimodular`` reduces modulo primes just below
2**62, multiplies 21-bit pieces of the residues in binary64 (every partial
sum is an integer below 2**53, so the BLAS result is exact), reduces in int64
and rebuilds the result by the Chinese remainder theorem.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ._primes import PRIMES_62

CHUNK_BITS = 21
CHUNK_MASK = (1 << CHUNK_BITS) - 1
CHUNKS = 3                      # 3 * 21 = 63 bits covers any residue
# chunk products are summed in binary64, which is exact below 2**53
MAX_INNER = 1 << (53 - 2 * CHUNK_BITS)
ALGORITHMS = ("classical", "multimodular", "auto")


@dataclass
class IntMatrix:
    rows: int
    cols: int
    entries: List[int]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match the shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        return cls(r, c, [int(v) for row in rows for v in row])

    @classmethod
    def from_array(cls, a: np.ndarray) -> "IntMatrix":
        r, c = a.shape
        return cls(r, c, [int(v) for v in a.ravel()])

    def to_array(self) -> np.ndarray:
        a = np.empty((self.rows, self.cols), dtype=object)
        a.ravel()[:] = self.entries
        return a

    def to_rows(self) -> List[List[int]]:
        c = self.cols
        return [self.entries[i * c:(i + 1) * c] for i in range(self.rows)]

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def height(self) -> int:
        """Bit length of the largest absolute entry."""
        return max((abs(v).bit_length() for v in self.entries), default=0)


def _object_array(a) -> np.ndarray:
    if isinstance(a, IntMatrix):
        return a.to_array()
    a = np.asarray(a, dtype=object)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    return a


def _height(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return max(abs(int(v)).bit_length() for v in a.ravel())


def primes_for_bound(bound_bits: int) -> List[int]:
    """Primes whose product exceeds ``2**(bound_bits + 1)``."""
    out, prod = [], 1
    for p in PRIMES_62:
        if prod.bit_length() > bound_bits + 1:
            return out
        out.append(p)
        prod *= p
    if prod.bit_length() > bound_bits + 1:
        return out
    raise OverflowError("not enough primes for a %d-bit bound" % bound_bits)


def max_multimodular_bits() -> int:
    prod = 1
    for p in PRIMES_62:
        prod *= p
    return prod.bit_length() - 2


def _chunks(r: np.ndarray) -> List[np.ndarray]:
    return [((r >> (CHUNK_BITS * u)) & CHUNK_MASK).astype(np.float64)
            for u in range(CHUNKS)]


def _matmul_mod(ra: np.ndarray, rb: np.ndarray, p: int) -> np.ndarray:
    """Product of int64 residue matrices modulo ``p``, as an object array."""
    ca, cb = _chunks(ra), _chunks(rb)
    k = ra.shape[1]
    acc = [np.zeros((ra.shape[0], rb.shape[1]), dtype=np.int64)
           for _ in range(2 * CHUNKS - 1)]
    for lo in range(0, max(k, 1), MAX_INNER):
        hi = min(k, lo + MAX_INNER)
        for u in range(CHUNKS):
            au = ca[u][:, lo:hi]
            for v in range(CHUNKS):
                t = (au @ cb[v][lo:hi, :]).astype(np.int64) % p
                w = acc[u + v]
                w += t
                w %= p
    out = acc[0].astype(object)
    for w in range(1, 2 * CHUNKS - 1):
        out = (out + acc[w].astype(object) * pow(2, CHUNK_BITS * w, p)) % p
    return out


def _crt_symmetric(residues: List[np.ndarray], primes: List[int]) -> np.ndarray:
    x = residues[0]
    mod = primes[0]
    for r, p in zip(residues[1:], primes[1:]):
        inv = pow(mod % p, -1, p)
        t = ((r - x) * inv) % p
        x = x + t * mod
        mod *= p
    half = mod >> 1
    return np.where(x > half, x - mod, x)


def _multimodular(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = a.shape[1]
    bound = _height(a) + _height(b) + max(k, 1).bit_length()
    primes = primes_for_bound(bound)
    res = []
    for p in primes:
        ra = (a % p).astype(np.int64)
        rb = (b % p).astype(np.int64)
        res.append(_matmul_mod(ra, rb, p))
    return _crt_symmetric(res, primes)


def int_matmul_array(a: np.ndarray, b: np.ndarray, algo: str = "auto") -> np.ndarray:
    """Product of two object arrays of integers."""
    if a.shape[1] != b.shape[0]:
        raise ValueError("inner dimensions differ: %d vs %d" % (a.shape[1], b.shape[0]))
    if algo not in ALGORITHMS:
        raise ValueError("unknown algorithm %r" % algo)
    m, k = a.shape
    n = b.shape[1]
    if m == 0 or n == 0 or k == 0:
        return np.zeros((m, n), dtype=object) + 0
    if algo == "auto":
        bits = _height(a) + _height(b) + k.bit_length()
        small = min(m, n, k) < 8
        algo = "classical" if small or bits > max_multimodular_bits() else "multimodular"
    if algo == "classical":
        return a.dot(b)
    return _multimodular(a, b)


def int_matmul(A, B, algo: str = "auto") -> IntMatrix:
    """Exact product of integer matrices.

    ``algo`` is ``"classical"``, ``"multimodular"`` or ``"auto"``.  Both
    concrete algorithms return identical results.
    """
    a, b = _object_array(A), _object_array(B)
    return IntMatrix.from_array(int_matmul_array(a, b, algo))
