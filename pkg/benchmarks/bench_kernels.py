"""Compare the compiled GF(2) kernels with their pure-Python twins.

    python benchmarks/bench_kernels.py [--repeat N] [--seed S]

Prints one row per workload with the median time of each backend and the
speedup.  Both backends are checked to return identical results first.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from hoferbound import _kernels_py
from hoferbound.complex import Generator, admissible_entries, forced_ranks

try:
    from hoferbound import _kernels
except ImportError:
    _kernels = None


def reduction_columns(rng, n, density):
    """Strictly upper-triangular random boundary columns as bitsets."""
    cols = []
    for j in range(n):
        mask = rng.random(j) < density
        cols.append(sum(1 << int(i) for i in np.flatnonzero(mask)))
    return cols


def search_instance(rng, n_pairs):
    """Generators that pair off across adjacent gradings, so an exact complex exists."""
    while True:
        gens = []
        for i in range(n_pairs):
            k = int(rng.integers(0, 3))
            lo, hi = sorted(rng.uniform(-5, 5, 2))
            gens += [Generator(f"t{i}", k, float(lo)), Generator(f"s{i}", k + 1, float(hi))]
        entries = admissible_entries(gens)
        if forced_ranks(gens) is not None and 12 <= len(entries) <= 24:
            break
    order = sorted(gens, key=lambda g: g.filtration)
    pos = {g.id: i for i, g in enumerate(order)}
    rows = [[] for _ in order]
    for t, s in entries:
        rows[pos[s]].append(pos[t])
    for r in rows:
        r.sort()
    return [g.filtration for g in order], [g.grading for g in order], rows


def timed(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for a in args:
            fn(*a)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ns = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return 1
    rng = np.random.default_rng(ns.seed)

    workloads = []
    for n, dens in ((16, 0.3), (32, 0.2), (64, 0.1)):
        cols = [(reduction_columns(rng, n, dens),) for _ in range(200)]
        workloads.append((f"reduce n={n}", "reduce_pairs", cols))
    for pairs in (5, 7):
        inst = [search_instance(rng, pairs) for _ in range(10)]
        workloads.append((f"search pairs={pairs}", "search_min_depth", inst))

    print(f"{'workload':<20}{'cython (ms)':>14}{'python (ms)':>14}{'speedup':>10}")
    for label, name, args in workloads:
        fast, slow = getattr(_kernels, name), getattr(_kernels_py, name)
        for a in args:
            assert fast(*a) == slow(*a), f"backends disagree on {label}"
        tf, ts = timed(fast, args, ns.repeat), timed(slow, args, ns.repeat)
        print(f"{label:<20}{tf * 1e3:>14.2f}{ts * 1e3:>14.2f}{ts / tf:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
