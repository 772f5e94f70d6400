"""GF(p) elimination: compiled kernel against the numpy fallback.

    python benchmarks/bench_gfp.py [--sizes 100 200 400] [--p 3] [--repeat 3]

Also times one NS degree search per backend.  Both backends must return
the same pivots.
"""

import argparse
import time

import numpy as np

from nsworkbench import linalg
from nsworkbench.nullstellensatz import search_ns, system_neg_injphp
from nsworkbench.poly import RingSpec


def best_of(fn, repeat):
    out = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backends = sorted(linalg.BACKENDS)
    print(f"backends: {', '.join(backends)} (default {linalg.BACKEND})")
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>6} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for n in args.sizes:
        A = rng.integers(0, args.p, size=(n, n + 1), dtype=np.int64)
        times, pivots = {}, {}
        for b in backends:
            times[b] = best_of(lambda: linalg.rref(A.copy(), args.p, backend=b), args.repeat)
            pivots[b] = linalg.rref(A.copy(), args.p, backend=b)
        assert all(pv == pivots[backends[0]] for pv in pivots.values()), "backends disagree"
        sp = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{n:>6} " + " ".join(f"{times[b]:>9.4f}s" for b in backends) + f"   {sp:7.1f}x")
    S = system_neg_injphp(4, 3, RingSpec.field(args.p))
    for b in backends:
        linalg.set_backend(b)
        t = best_of(lambda: search_ns(S, 1, 0, 2), 1)
        print(f"search_ns not-injPHP^4_3 d=2 F{args.p} [{b}]: {t:.3f}s")


if __name__ == "__main__":
    main()
