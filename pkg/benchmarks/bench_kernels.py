"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--size N] [--repeat R]

Times each kernel on random bits and one full bounded check (M_loop, 5 chunks),
after a warm-up call so numba compilation is excluded.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from minsky_presburger import checker, encoder, kernels, machine, model


def best_of(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(size: int):
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size, dtype=np.uint8)
    idx = rng.integers(0, size, size // 4, dtype=np.int64)
    mask = kernels.pattern_mask(bits, (1, 0))
    starts = np.sort(rng.integers(0, size, 1000))
    stops = starts + 500

    prog = machine.parse_program("0: inc c1\n1: tdec c2 0\n2: halt\n")
    d = encoder.compute_d(prog, 0, 0)
    enc = encoder.encode(prog, 0, 0)
    bm = model.build_canonical(machine.extend_halting(machine.run(prog, 0, 0, 4), 5), d)
    cfg = checker.CheckerConfig(model.chunk_start(4, d))
    return {
        "pattern_mask(001011)": lambda: kernels.pattern_mask(bits, (0, 0, 1, 0, 1, 1)),
        "gather": lambda: kernels.gather(bits, idx, size),
        "count_in_ranges": lambda: kernels.count_in_ranges(mask, starts, stops),
        "check_report(M_loop, 5 chunks)": lambda: checker.check_report(enc, bm, cfg),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    jobs = workloads(args.size)
    backends = kernels.available_backends()
    print(f"{'workload':34s}" + "".join(f"{b:>12s}" for b in backends))
    for name, fn in jobs.items():
        row = []
        for b in backends:
            kernels.use_backend(b)
            row.append(best_of(fn, args.repeat))
        print(f"{name:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in row))


if __name__ == "__main__":
    main()
