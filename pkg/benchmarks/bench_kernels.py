"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from resultlab import cliquecodes, trees
from resultlab._backend import available_backends, get_kernels
from resultlab.rng import stream
from resultlab.sieve848 import _trial_primes


def _cases():
    rng = stream(0)
    t = 20_000
    is_w = rng.integers(0, 2, size=t).astype(np.uint8)
    uniforms = rng.random(t)
    adj = cliquecodes.alon_checks(13).adjacency()
    vals = np.arange(1, 20_001, dtype=np.int64) ** 2 + 1
    primes = _trial_primes(int(vals.max()))
    tree = trees.random_tree(64, rng)

    def pa(k):
        parent = np.full(t, -1, dtype=np.int64)
        k.pa_extend(is_w, 2.0, parent, np.zeros(t), 1, t, uniforms, np.zeros(3))

    return {
        "tree profiles, all 16807 trees n=7": lambda k: k.prufer_profiles(7, 0, 16807),
        "subtree enumeration, n=64": lambda k: k.esu_counts(64, tree.edges),
        "attachment growth, t=2e4": pa,
        "clique parity scan, n=13": lambda k: k.clique_scan(13, adj),
        "squarefree flags, 2e4 values": lambda k: k.squarefree_flags(vals, primes),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = available_backends()
    print(f"{'kernel':40s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in _cases().items():
        best = {}
        for name in names:
            k = get_kernels(name)
            times = []
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                fn(k)
                times.append(time.perf_counter() - t0)
            best[name] = min(times)
        line = f"{label:40s}" + "".join(f"{best[n]:11.4f}s" for n in names)
        if len(names) == 2:
            line += f"{best['python'] / best['compiled']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
