"""Compare the compiled and pure-Python closure kernels on random purpose graphs.

    python3 benchmarks/bench_kernels.py [--sizes 100 300 1000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import random
import time

from purposecheck import _pykernels

try:
    from purposecheck import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def random_dag(n: int, edges_per_node: float, rng: random.Random) -> tuple[list[int], list[int]]:
    src, dst = [], []
    for _ in range(int(n * edges_per_node)):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            src.append(max(a, b))  # child -> more general parent
            dst.append(min(a, b))
    return src, dst


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 300, 1000])
    ap.add_argument("--density", type=float, default=1.5, help="edges per purpose")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'n':>6} {'kernel':<14}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        src, dst = random_dag(n, args.density, rng)
        seeds = bytearray(rng.random() < 0.1 for _ in range(n))
        hops = _pykernels.all_pairs_hops(n, src, dst)
        rows = {
            "all_pairs_hops": lambda k: k.all_pairs_hops(n, src, dst),
            "nearest_seed": lambda k: k.nearest_seed(hops, n, seeds),
        }
        for label, call in rows.items():
            times = [best_of(lambda k=k: call(k), args.repeat) for _, k in backends]
            # both backends must agree before their timings mean anything
            results = [list(call(k)) for _, k in backends]
            assert all(r == results[0] for r in results), f"backends disagree on {label}"
            speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
            print(f"{n:>6} {label:<14}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
