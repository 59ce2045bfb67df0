#!/usr/bin/env python3
"""Throughput comparison: compiled kernels vs the pure-NumPy fallback.

Times the three hot loops (single-run iteration, batched iteration, and
finite-population path sampling) on matched workloads and prints a table
with per-step costs and speedups.  Run from the repository root:

    python benchmarks/bench_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wfeq import _kernels_py

try:
    from wfeq import _kernels
except ImportError:
    _kernels = None


def _survival_workload(rng, dim):
    W = rng.uniform(0.0, 1.0, size=(dim, dim))
    p0 = rng.dirichlet(np.ones(dim))
    return W, p0


def bench_iterate_survival(mod, rng, dim, max_steps):
    W, p0 = _survival_workload(rng, dim)
    started = time.perf_counter()
    states, status, _ = mod.iterate_survival(W, p0, max_steps, 0.0)  # never converges
    elapsed = time.perf_counter() - started
    return elapsed, len(states) - 1


def bench_iterate_fluctuation(mod, rng, dim, max_steps):
    rho = rng.dirichlet(np.full(dim, 50.0))
    pi = float(rho.prod())
    p0 = rng.dirichlet(np.ones(dim))
    started = time.perf_counter()
    states, status, _ = mod.iterate_fluctuation(rho, pi, p0, max_steps, 0.0)
    elapsed = time.perf_counter() - started
    return elapsed, len(states) - 1


def bench_batch(mod, rng, dim, rows, max_steps):
    rhos = np.stack([rng.dirichlet(np.full(dim, 50.0)) for _ in range(rows)])
    pis = rhos.prod(axis=1)
    p0s = np.stack([rng.dirichlet(np.ones(dim)) for _ in range(rows)])
    started = time.perf_counter()
    _, steps, _, _ = mod.iterate_fluctuation_batch(rhos, pis, p0s, max_steps, 0.0)
    elapsed = time.perf_counter() - started
    return elapsed, int(steps.sum())


def bench_simulate(mod, rng, dim, pop, steps):
    W = rng.uniform(0.3, 1.0, size=(dim, dim))
    counts0 = np.full(dim, pop // dim, dtype=np.int64)
    counts0[0] += pop - counts0.sum()
    bitgen = np.random.PCG64(np.random.SeedSequence(12345))
    started = time.perf_counter()
    path, _, _ = mod.simulate_replica(bitgen, W, counts0, steps)
    elapsed = time.perf_counter() - started
    return elapsed, len(path) - 1


BENCHES = [
    ("iterate survival d=2", bench_iterate_survival, {"dim": 2}),
    ("iterate survival d=6", bench_iterate_survival, {"dim": 6}),
    ("iterate equilibrium d=6", bench_iterate_fluctuation, {"dim": 6}),
    ("batch x200 equilibrium d=6", bench_batch, {"dim": 6, "rows": 200}),
    ("sample paths N=100 d=2", bench_simulate, {"dim": 2, "pop": 100}),
    ("sample paths N=1000 d=6", bench_simulate, {"dim": 6, "pop": 1000}),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    step_budget = 20_000 if args.quick else 200_000
    batch_budget = 500 if args.quick else 2_000
    sample_budget = 5_000 if args.quick else 50_000

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled kernels not built; timing the fallback only\n")

    header = f"{'workload':<30} " + "".join(f"{name:>14} " for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, fn, params in BENCHES:
        if fn is bench_batch:
            budget = batch_budget
        elif fn is bench_simulate:
            budget = sample_budget
        else:
            budget = step_budget
        per_step = []
        for _, mod in backends:
            rng = np.random.Generator(np.random.PCG64(99))
            if fn is bench_simulate:
                elapsed, steps = fn(mod, rng, steps=budget, **params)
            else:
                elapsed, steps = fn(mod, rng, max_steps=budget, **params)
            per_step.append(elapsed / max(steps, 1))
        row = f"{label:<30} " + "".join(f"{x * 1e9:>11.0f} ns " for x in per_step)
        if len(per_step) == 2:
            row += f"{per_step[0] / per_step[1]:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
