"""Arbitrary-precision ball arithmetic kernels: fused dot products and block
matrix multiplication over scaled integer matrices."""

from .numbers import (ApFloat, Ball, ComplexBall, Mag, apfloat_normalize,
                      apfloat_round, ball_fallback_addmul, mag_add_up,
                      mag_mul_up, mag_upper_from_apfloat)
from .dot import (DotAccumulator, DotPlan, dot_approx, dot_ball,
                  dot_complex_approx, dot_complex_ball, dot_setup)

__version__ = "0.1.0"

from .intmat import IntMatrix, int_matmul
from .matmul import (BallMatrix, ComplexBallMatrix, block_matmul_ball,
                     classical_matmul_ball, complex_matmul_ball, matmul_auto,
                     plan_blocks, radius_matmul_upper)
from .poly import poly_mullow_classical, series_exp_basecase
from .verify import run_verify
from .bench_cli import BenchSpec, run_bench
