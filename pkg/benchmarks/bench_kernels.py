#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure fallback.

Runs each hot kernel on a representative workload with both backends,
checks that the outputs are identical, and prints a timing table.

    python3 benchmarks/bench_kernels.py
"""

import itertools
import math
import time

import numpy as np

from fqlab._kernels import available_backends
from fqlab.channel import TwoStateChannel, _xlogx_subset_table
from fqlab.codec import _log_prior, _particular_solutions, random_parity
from fqlab.field import FieldSpec
from fqlab.prob import Pmf
from fqlab.rng import ANNEAL_STREAM, substream


def bench(fn, repeats=3):
    best = math.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def scan_workload():
    """Full-support per-letter scan at q = 7: 7^7 = 823543 tables."""
    q = 7
    ch = TwoStateChannel.sum_product(FieldSpec(q), ps1=Pmf.uniform(q))
    sup = ch.ps1.support()
    psup = ch.ps1.as_float()[sup]
    xlogx = _xlogx_subset_table(psup)
    grid = ch.additive_shift().as_array()
    shift_sub = np.asarray([[int(grid[s1, s2]) for s2 in range(q)] for s1 in sup],
                           dtype=np.int64)
    args = (shift_sub, q, xlogx, ch.ps2.as_float(), 0, q ** len(sup))
    return "scan q=7 full support (823543 tables)", args, "scan_additive"


def decode_workload():
    """Decode-table construction for n = 24, m = 12 over F_2 (16.7M members)."""
    q = 2
    code = random_parity(FieldSpec(q), 24, 12, seed=0)
    span = code.codewords()
    total = q ** code.m
    pw = q ** np.arange(code.m - 1, -1, -1, dtype=np.int64)
    synds = (np.arange(total, dtype=np.int64)[:, None] // pw[None, :]) % q
    z0s = _particular_solutions(code, synds)
    logp = _log_prior(Pmf.bernoulli(0.05))
    args = (z0s, span, q, logp, None)
    return "decode table n=24 m=12 (4096 x 4096 members)", args, "decode_cosets"


def anneal_workload():
    """Annealing chain at q = 3, n = 2, 200000 proposals."""
    q, n, budget = 3, 2, 200000
    ch = TwoStateChannel.sum_product(FieldSpec(q))
    grid = ch.additive_shift().as_array()
    ps1, ps2 = ch.ps1.as_float(), ch.ps2.as_float()
    big_q = q ** n
    sup = ch.ps1.support()
    sup_tuples = list(itertools.product(sup, repeat=n))

    def pack(tp):
        idx = 0
        for d in tp:
            idx = idx * q + d
        return idx

    sup_values = np.asarray([pack(tp) for tp in sup_tuples], dtype=np.int64)
    psup = np.asarray([math.prod(ps1[t] for t in tp) for tp in sup_tuples])
    xlogx = _xlogx_subset_table(psup)
    s2_tuples = list(itertools.product(range(q), repeat=n))
    ps2n = np.asarray([math.prod(ps2[t] for t in tp) for tp in s2_tuples])
    f2 = np.asarray([[pack(tuple(int(grid[tp[i], s2[i]]) for i in range(n)))
                      for s2 in s2_tuples] for tp in sup_tuples], dtype=np.int64)
    addq = np.asarray([[pack(tuple((a[i] + b[i]) % q for i in range(n)))
                        for b in s2_tuples] for a in s2_tuples], dtype=np.int64)
    g0 = np.zeros(big_q, dtype=np.int64)
    rng = substream(0, ANNEAL_STREAM)
    positions = rng.integers(0, len(sup_tuples), size=budget, dtype=np.int64)
    deltas = rng.integers(1, big_q, size=budget, dtype=np.int64)
    log_accept = np.log(rng.random(budget))
    args = (f2, sup_values, big_q, addq, xlogx, ps2n, g0, positions, deltas,
            log_accept, 0.5, 0.99997)
    return "anneal q=3 n=2 (200000 proposals)", args, "anneal_additive"


def equal(kind, a, b):
    if kind == "decode_cosets":
        return np.array_equal(a, b)
    if kind == "scan_additive":
        return a[0] == b[0] and a[1] == b[1] and a[2] == b[2]
    return (a[0] == b[0] and np.array_equal(a[1], b[1])
            and a[2] == b[2] and a[3] == b[3])


def main():
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; run `python3 setup.py build_ext --inplace`")
        print("benchmarking the pure backend only\n")
    rows = []
    for label, args, kind in (scan_workload(), decode_workload(), anneal_workload()):
        results = {}
        times = {}
        for name, mod in backends.items():
            times[name], results[name] = bench(lambda: getattr(mod, kind)(*args))
        if len(results) == 2:
            assert equal(kind, results["pure"], results["compiled"]), \
                f"backend outputs differ on {label}"
        rows.append((label, times))
    width = max(len(r[0]) for r in rows)
    header = f"{'workload'.ljust(width)}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, times in rows:
        pure_t = times.get("pure", math.nan)
        comp_t = times.get("compiled", math.nan)
        speed = pure_t / comp_t if comp_t == comp_t and comp_t > 0 else math.nan
        comp_s = f"{comp_t:>9.3f}s" if comp_t == comp_t else "       n/a"
        speed_s = f"{speed:>7.1f}x" if speed == speed else "     n/a"
        print(f"{label.ljust(width)}  {pure_t:>9.3f}s  {comp_s}  {speed_s}")
    if len(backends) == 2:
        print("\nbackend outputs identical on every workload")


if __name__ == "__main__":
    main()
