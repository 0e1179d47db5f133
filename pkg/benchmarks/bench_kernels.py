"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--gens 5] [--repeat 3]

Each case runs the same inputs through both backends, checks that the
outputs agree bit for bit and reports the best wall time of ``--repeat`` tries.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from moead_amr import evolve, problems
from moead_amr._backend import compiled_kernels, python_kernels


def best_time(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def generation_case(name: str, gens: int):
    problem = problems.get_problem(name)
    cfg = evolve.RunConfig(seed=1)
    base = evolve.initialize(problem, cfg)
    r = np.ones(problem.m)

    def make(kern):
        def go():
            state = evolve.initialize(problem, cfg)
            saved = evolve.kernels
            evolve.kernels = kern
            try:
                for _ in range(gens):
                    evolve.step(state, problem, cfg, r)
            finally:
                evolve.kernels = saved
            return state.F.copy()
        return go

    return f"{gens} generations {name} (N={len(base.X)})", make


def eval_case(name: str, rows: int):
    problem = problems.get_problem(name)
    X = np.random.default_rng(0).uniform(problem.bounds.lower, problem.bounds.upper,
                                         (rows, problem.n))

    def make(kern):
        return lambda: kern.evaluate_batch(problem.kernel_id, X, problem.m)

    return f"evaluate {rows} x {name}", make


def nd_case(m: int, rows: int):
    P = np.random.default_rng(0).random((rows, m))
    P[:, -1] = 1.0 - P[:, :-1].sum(axis=1) / (m - 1)

    def make(kern):
        return lambda: kern.nondominated_mask(np.ascontiguousarray(P))

    return f"nondominated filter {rows} x m={m}", make


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gens", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled_kernels is None:
        raise SystemExit("compiled kernels are not built; reinstall without MOEAD_AMR_NO_EXT")

    cases = [
        generation_case("zdt1", args.gens),
        generation_case("dtlz2", args.gens),
        eval_case("dtlz2", 20_000),
        nd_case(3, 20_000),
    ]
    print(f"{'case':42s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}  equal")
    for label, make in cases:
        tc, oc = best_time(make(compiled_kernels), args.repeat)
        tp, op = best_time(make(python_kernels), args.repeat)
        same = np.array_equal(np.asarray(oc), np.asarray(op))
        print(f"{label:42s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}  {same}")


if __name__ == "__main__":
    main()
