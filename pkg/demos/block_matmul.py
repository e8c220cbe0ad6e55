"""Block matrix multiplication over scaled integer matrices.

Run: python3 demos/block_matmul.py
"""

import random
import time

from ballkit.matmul import (block_matmul_ball, classical_matmul_ball,
                            matmul_auto, plan_blocks)
from ballkit.oracle import ball_contains, mag_to_fraction, rational_matmul_exact
from ballkit.profiles import pascal_matrix, uniform_matrix

rng = random.Random(3)
n, p = 80, 128
A, B = uniform_matrix(n, n, p, rng), uniform_matrix(n, n, p, rng)

t0 = time.perf_counter()
info = {}
C = block_matmul_ball(A, B, p, info=info)
t_block = time.perf_counter() - t0
t0 = time.perf_counter()
D = classical_matmul_ball(A, B, p)
t_classical = time.perf_counter() - t0
print("uniform %dx%d p=%d: block %.2f s, classical %.2f s, %d block(s)"
      % (n, n, p, t_block, t_classical, info["blocks"]))

worst = max(float(mag_to_fraction(C[i, j].rad) / mag_to_fraction(D[i, j].rad))
            for i in range(n) for j in range(n))
print("  worst radius ratio block/classical: %.2f" % worst)

# exact product of the midpoints is inside every output ball
exact = rational_matmul_exact([[A[i, k].mid for k in range(n)] for i in range(4)],
                              [[B[k, j].mid for j in range(4)] for k in range(n)])
print("  4x4 corner contained:",
      all(ball_contains(C[i, j], exact[i][j]) for i in range(4) for j in range(4)))

# entries growing like binomials force the planner to split
for size in (100, 120, 300):
    P = pascal_matrix(size, 53)
    steps = plan_blocks(P, P, 53)
    print("pascal N=%d p=53: %d block(s), basecase %d"
          % (size, len(steps), sum(s.basecase for s in steps)))

# small matrices go through the classical path automatically
small = matmul_auto(uniform_matrix(5, 5, p, rng), uniform_matrix(5, 5, p, rng), p)
print("matmul_auto 5x5 entry:", small[0, 0])
