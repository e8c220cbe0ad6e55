"""Word-array (limb) primitives.

A limb slice is a plain Python list of 64-bit unsigned words, least
significant first, so ``[a0, a1]`` is ``a0 + a1 * 2**64``.  Every function
here works on whole words and mirrors one GMP ``mpn`` call; the packed-integer
fast paths elsewhere in the package must agree with these bit for bit.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

LIMB_BITS = 64
LIMB_MASK = (1 << LIMB_BITS) - 1

Limbs = List[int]


def to_int(limbs: Sequence[int]) -> int:
    value = 0
    for limb in reversed(limbs):
        value = (value << LIMB_BITS) | limb
    return value


def from_int(value: int, n: int) -> Limbs:
    """Low ``n`` limbs of ``value`` (taken modulo ``2**(64*n)``)."""
    return [(value >> (LIMB_BITS * k)) & LIMB_MASK for k in range(n)]


def mul_limbs(a: Sequence[int], b: Sequence[int]) -> Limbs:
    """Schoolbook product; the result always has ``len(a) + len(b)`` limbs."""
    if not a or not b:
        raise ValueError("mul_limbs needs nonempty operands")
    out = [0] * (len(a) + len(b))
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        carry = 0
        for j, bj in enumerate(b):
            w = out[i + j] + ai * bj + carry
            out[i + j] = w & LIMB_MASK
            carry = w >> LIMB_BITS
        out[i + len(b)] = carry
    return out


def add_signed_range(s: Limbs, t: Sequence[int], offset: int,
                     carry_span: int, negate: bool = False) -> None:
    """In place ``s += t * 2**(64*offset)`` (or ``-=`` when ``negate``).

    The carry (or borrow) may ripple at most ``carry_span`` limbs above the
    window ``s[offset:offset+len(t)]``; running off the top of ``s`` wraps,
    which is two's complement arithmetic modulo ``2**(64*len(s))``.
    """
    top = offset + len(t)
    if top > len(s):
        raise ValueError("window exceeds accumulator")
    carry = 0
    if negate:
        for k, tk in enumerate(t):
            w = s[offset + k] - tk - carry
            s[offset + k] = w & LIMB_MASK
            carry = 1 if w < 0 else 0
    else:
        for k, tk in enumerate(t):
            w = s[offset + k] + tk + carry
            s[offset + k] = w & LIMB_MASK
            carry = w >> LIMB_BITS
    k = top
    end = min(len(s), top + carry_span)
    while carry and k < end:
        if negate:
            w = s[k] - 1
            carry = 1 if w < 0 else 0
        else:
            w = s[k] + 1
            carry = w >> LIMB_BITS
        s[k] = w & LIMB_MASK
        k += 1
    assert not carry or k == len(s), "carry propagated beyond carry_span"


def rshift_bits(t: Sequence[int], bits: int) -> Limbs:
    """Shift right by ``bits`` into one extra bottom limb (nothing is lost)."""
    if not 1 <= bits < LIMB_BITS:
        raise ValueError("bits must be in 1..63")
    up = LIMB_BITS - bits
    out = [0] * (len(t) + 1)
    for k, tk in enumerate(t):
        out[k] |= (tk << up) & LIMB_MASK
        out[k + 1] = tk >> bits
    return out


def neg_in_place(s: Limbs) -> None:
    """``s <- 2**(64*len(s)) - s``."""
    borrow = 0
    for k, sk in enumerate(s):
        w = -sk - borrow
        s[k] = w & LIMB_MASK
        borrow = 1 if w < 0 else 0


def mulhigh_approx(a: Sequence[int], b: Sequence[int],
                   k: int) -> Tuple[Limbs, int]:
    """Top ``k`` limbs of ``a*b`` from a short product.

    Partial products below two guard limbs are skipped; the returned limbs
    are then at most one unit below the exact top ``k`` limbs.  The second
    item is the error bound in units of the lowest returned limb (0 when no
    partial product was skipped).
    """
    total = len(a) + len(b)
    if not 0 < k <= total:
        raise ValueError("k out of range")
    lowest = total - k - 2
    if lowest <= 0:
        full = mul_limbs(a, b)
        return full[total - k:], 0
    acc = 0
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        jmin = max(0, lowest - i)
        for j in range(jmin, len(b)):
            acc += (ai * b[j]) << (LIMB_BITS * (i + j - lowest))
    acc >>= LIMB_BITS * (total - k - lowest)
    return from_int(acc, k), 1
