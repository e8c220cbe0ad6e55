"""Benchmark and verification command line.

::

    ballkit bench --op dot_ball --n 100 --prec 128 --profile uniform --reps 50
    ballkit verify --suite dot --trials 10000 --seed 1

Exit status is 0 on success, 1 when verification finds a failure and 2 for
usage errors.  ``BALLKIT_MAX_N`` caps benchmark sizes and the matrix and
vector sizes drawn by ``verify``.
"""

from __future__ import annotations

import argparse
import csv
import io
import random
import statistics
import sys
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

from .dot import (dot_approx, dot_ball, dot_complex_ball, dot_complex_naive,
                  dot_naive)
from .matmul import (BallMatrix, block_matmul_ball, classical_matmul_ball,
                     dispatch_cutoff, matmul_auto)
from .numbers import BALL_ONE, BALL_ZERO, Ball, ball_div_int, ball_mul_int
from .poly import poly_mullow_classical, series_exp_basecase
from .profiles import PROFILES, dot_inputs, matrix_inputs
from .verify import SIZE_CAP_ENV, SUITES, run_verify, size_cap

OPERATIONS = ("dot_ball", "dot_approx", "dot_complex", "matmul_classical",
              "matmul_block", "matmul_auto", "poly_mul", "series_exp")
CSV_COLUMNS = ("operation", "N", "p", "profile", "ns_per_term", "ratio_vs_naive",
               "blocks")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class BenchSpec:
    operation: str
    n: int
    p: int
    profile: str = "uniform"
    reps: int = 5
    seed: int = 1

    def validate(self) -> None:
        if self.operation not in OPERATIONS:
            raise UsageError("unknown operation %r" % self.operation)
        if self.profile not in PROFILES:
            raise UsageError("unknown profile %r" % self.profile)
        if self.n < 1 or self.p < 2 or self.reps < 1:
            raise UsageError("need N >= 1, p >= 2 and reps >= 1")
        if self.operation == "dot_complex" and self.profile != "complex_uniform":
            raise UsageError("dot_complex needs the complex_uniform profile")
        if self.operation != "dot_complex" and self.profile == "complex_uniform":
            raise UsageError("complex_uniform is only for dot_complex")


@dataclass
class BenchResult:
    spec: BenchSpec
    seconds: float              # median wall time of one call
    baseline_seconds: float
    terms: int                  # multiply-adds per call
    blocks: Optional[int] = None

    @property
    def ns_per_term(self) -> float:
        return self.seconds * 1e9 / self.terms

    @property
    def ratio_vs_naive(self) -> float:
        return self.baseline_seconds / self.seconds

    def row(self) -> List[str]:
        return [self.spec.operation, str(self.spec.n), str(self.spec.p),
                self.spec.profile, "%.1f" % self.ns_per_term,
                "%.3f" % self.ratio_vs_naive,
                "" if self.blocks is None else str(self.blocks)]


def median_time(fn: Callable[[], object], reps: int, warmup: int = 1) -> float:
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


# -- naive baselines: one rounded multiply-add per term -------------------------

def naive_matmul(A: BallMatrix, B: BallMatrix, p: int) -> BallMatrix:
    N = B.cols
    out = []
    for i in range(A.rows):
        row = A.row(i)
        for k in range(N):
            out.append(dot_naive(row, B.entries[k::N], p))
    return BallMatrix(A.rows, N, out)


def naive_mullow(a: Sequence[Ball], b: Sequence[Ball], length: int, p: int):
    out = []
    for k in range(length):
        idx = [i for i in range(k + 1) if i < len(a) and k - i < len(b)]
        out.append(dot_naive([a[i] for i in idx], [b[k - i] for i in idx], p))
    return out


def naive_series_exp(a: Sequence[Ball], length: int, p: int):
    ja = [ball_mul_int(a[j], j) for j in range(1, min(len(a), length))]
    b = [BALL_ONE]
    for k in range(1, length):
        m = min(k, len(ja))
        s = dot_naive(ja[:m], [b[k - 1 - i] for i in range(m)], p) if m else BALL_ZERO
        b.append(ball_div_int(s, k, p))
    return b


def run_bench(spec: BenchSpec) -> BenchResult:
    """Median timing of ``spec.operation`` and of its baseline.

    Dot, polynomial and series operations are compared with the naive
    multiply-add loop; ``matmul_classical`` with the same loop per entry;
    ``matmul_block`` and ``matmul_auto`` with ``matmul_classical``.
    """
    spec.validate()
    rng = random.Random(spec.seed)
    n, p, op = spec.n, spec.p, spec.operation
    blocks = None
    if op in ("dot_ball", "dot_approx", "dot_complex"):
        x, y = dot_inputs(spec.profile, n, p, rng)
        terms = n
        fn = {"dot_ball": lambda: dot_ball(x, y, p),
              "dot_approx": lambda: dot_approx(x, y, p),
              "dot_complex": lambda: dot_complex_ball(x, y, p)}[op]
        base = (lambda: dot_complex_naive(x, y, p)) if op == "dot_complex" \
            else (lambda: dot_naive(x, y, p))
    elif op.startswith("matmul"):
        A, B = matrix_inputs(spec.profile, n, p, rng)
        terms = n ** 3
        if op == "matmul_classical":
            fn = lambda: classical_matmul_ball(A, B, p)
            base = lambda: naive_matmul(A, B, p)
        else:
            info = {}
            if op == "matmul_block":
                fn = lambda: block_matmul_ball(A, B, p, info=info)
            else:
                fn = lambda: matmul_auto(A, B, p)
            base = lambda: classical_matmul_ball(A, B, p)
            if op == "matmul_block" or n > dispatch_cutoff(p):
                block_matmul_ball(A, B, p, info=info)
                blocks = info["blocks"]
    else:
        x, y = dot_inputs(spec.profile, n, p, rng)
        if op == "poly_mul":
            terms = n * (n + 1) // 2
            fn = lambda: poly_mullow_classical(x, y, n, p)
            base = lambda: naive_mullow(x, y, n, p)
        else:
            a = [BALL_ZERO] + list(x[1:])
            terms = max(1, n * (n - 1) // 2)
            fn = lambda: series_exp_basecase(a, n, p)
            base = lambda: naive_series_exp(a, n, p)
    t = median_time(fn, spec.reps)
    tb = median_time(base, spec.reps)
    return BenchResult(spec, t, tb, terms, blocks)


def results_csv(results: Sequence[BenchResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()


# -- command line -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ballkit", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    b = sub.add_parser("bench", help="time one operation against its baseline")
    b.add_argument("--op", required=True, choices=OPERATIONS)
    b.add_argument("--n", required=True, type=int)
    b.add_argument("--prec", required=True, type=int)
    b.add_argument("--profile", default="uniform", choices=PROFILES)
    b.add_argument("--reps", default=5, type=int)
    b.add_argument("--seed", default=1, type=int)
    b.add_argument("--csv", help="also write the CSV row to this file")
    v = sub.add_parser("verify", help="run a randomized oracle suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--trials", required=True, type=int)
    v.add_argument("--seed", required=True, type=int)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        if args.command == "bench":
            try:
                n = size_cap(args.n)
            except ValueError as e:
                raise UsageError(str(e))
            if n != args.n:
                print("note: N capped to %d by %s" % (n, SIZE_CAP_ENV), file=sys.stderr)
            spec = BenchSpec(args.op, n, args.prec, args.profile, args.reps, args.seed)
            spec.validate()
            text = results_csv([run_bench(spec)])
            sys.stdout.write(text)
            if args.csv:
                with open(args.csv, "w", newline="") as fh:
                    fh.write(text)
            return EXIT_OK
        if args.trials < 0:
            raise UsageError("trials must be nonnegative")
        try:
            size_cap(1)
        except ValueError as e:
            raise UsageError(str(e))
        rep = run_verify(args.suite, args.trials, args.seed)
        sys.stdout.write(rep.text())
        return EXIT_OK if rep.ok else EXIT_FAIL
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE

if __name__ == "__main__":
    sys.exit(main())
