"""Time each kernel under the numpy and numba backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Numba kernels are called once before timing so compilation is excluded.
Results are checked for equality between backends before anything is timed.
"""

import argparse
import json
import sys
import timeit

import numpy as np

from finitecomb import kakeya as kk
from finitecomb.kernels import backends


def _cases():
    rng = np.random.default_rng(0)
    q = 1009
    a = np.sort(rng.choice(q, 300, replace=False)).astype(np.int64)
    b = np.sort(rng.choice(q, 300, replace=False)).astype(np.int64)
    masks_a = rng.integers(1, 1 << 31, 20_000, dtype=np.uint64)
    masks_b = rng.integers(1, 1 << 31, 20_000, dtype=np.uint64)
    P = rng.integers(0, 101, (2000, 3))
    L = rng.integers(0, 101, (2000, 3))
    xs, ys = rng.integers(0, 103, 400), rng.integers(0, 103, 400)
    D = rng.integers(0, 4, 401).astype(np.int64)
    kq = 7
    dirs = np.array(kk.enumerate_directions(kq), dtype=np.int64)
    piv = np.array([kk._pivot(d) for d in dirs], dtype=np.int64)
    choice = rng.integers(0, kq * kq, len(dirs))
    props = np.stack([rng.integers(0, len(dirs), 20_000), rng.integers(0, kq * kq, 20_000)], axis=1)
    return {
        "mark_sums q=1009 |A|=|B|=300": ("mark_sums", (a, b, q)),
        "mark_products q=1009 |A|=|B|=300": ("mark_products", (a, b, q)),
        "dilate_sum_sizes q=1009": ("dilate_sum_sizes", (a[:40], b[:40], q, q + 1)),
        "sumset_sizes_masks q=31 x20000": ("sumset_sizes_masks", (masks_a, masks_b, 31)),
        "minmax_exhaustive q=17 n=5": ("minmax_exhaustive", (17, 5, 0, False)),
        "incidence_naive 2000x2000 q=101": ("incidence_naive", (P, L, 101)),
        "dist_set_size N=400 q=103": ("dist_set_size", (xs, ys, 103, False)),
        "distance_exhaustive q=7 n=4": ("distance_exhaustive", (7, 4, False)),
        "bsg_rep_counts m=401": ("bsg_rep_counts", (D,)),
        "kakeya_climb q=7 20000 moves": ("kakeya_climb", (dirs, piv, kq, choice, props)),
    }


def _copy(args):
    return tuple(x.copy() if isinstance(x, np.ndarray) else x for x in args)


def _same(x, y):
    if isinstance(x, tuple):
        return len(x) == len(y) and all(_same(u, v) for u, v in zip(x, y))
    return bool(np.array_equal(np.asarray(x), np.asarray(y)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write timings here as well")
    args = ap.parse_args(argv)

    mods = backends()
    if "numba" not in mods:
        print("numba is not installed; only the numpy backend can be timed", file=sys.stderr)
    rows = []
    for label, (name, call_args) in _cases().items():
        outs = {b: getattr(m, name)(*_copy(call_args)) for b, m in mods.items()}
        if len(outs) == 2 and not _same(outs["numpy"], outs["numba"]):
            print(f"{label}: backends disagree", file=sys.stderr)
            return 1
        times = {}
        for b, m in mods.items():
            fn = getattr(m, name)
            t = timeit.repeat(lambda: fn(*_copy(call_args)), number=1, repeat=args.repeat)
            times[b] = min(t)
        rows.append({"kernel": label, **{f"{b}_s": round(t, 6) for b, t in times.items()}})

    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  speedup")
    for r in rows:
        nb = r.get("numba_s")
        sp = f"{r['numpy_s'] / nb:7.1f}x" if nb else "      -"
        nbs = f"{nb:10.4f}" if nb is not None else f"{'-':>10}"
        print(f"{r['kernel']:<{width}}  {r['numpy_s']:10.4f}  {nbs}  {sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
