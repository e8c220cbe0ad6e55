"""Exact integer matrix products by multimodular reduction.

Run: python3 demos/multimodular.py
"""

import random
import time

from ballkit.intmat import IntMatrix, int_matmul, primes_for_bound

rng = random.Random(11)
n, bits = 60, 200
rows = lambda: [[rng.randrange(-2 ** bits, 2 ** bits) for _ in range(n)] for _ in range(n)]
A, B = IntMatrix.from_rows(rows()), IntMatrix.from_rows(rows())

for algo in ("classical", "multimodular"):
    t0 = time.perf_counter()
    C = int_matmul(A, B, algo=algo)
    print("%-12s %.3f s" % (algo, time.perf_counter() - t0))
    if algo == "classical":
        ref = C

print("identical:", C.to_rows() == ref.to_rows())
print("primes used for a %d-bit bound: %d" % (2 * bits + 6, len(primes_for_bound(2 * bits + 6))))
print("result height: %d bits" % C.height())
