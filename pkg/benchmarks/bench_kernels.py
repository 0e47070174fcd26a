"""Compare the compiled and numpy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--m 1500] [--repeat 3]

Each kernel runs on the same inputs under every importable backend; the
outputs are checked for equality before timings are reported.  The
end-to-end row times one full W_R estimate (graph, embedding, k search).
"""

import argparse
import time

import numpy as np

from specialk import kernels
from specialk.datagen import make_blobs
from specialk.experiments import run_estimate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=1500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    data = make_blobs(args.m, 0.1, seed=0)
    X = data.points
    D = rng.normal(size=(args.m, 200))
    C = D[rng.choice(args.m, 5, replace=False)]
    _, dist = kernels.knn_search(X, 10)
    eps = float(np.quantile(dist[:, -1], 0.99))

    cases = {
        "knn_search(k=10)": lambda mod: mod.knn_search(X, 10),
        "radius_pairs": lambda mod: mod.radius_pairs(X, eps),
        "assign_nearest(k=5,n=200)": lambda mod: mod.assign_nearest(D, C),
    }
    backends = kernels.available_backends()
    names = sorted(backends)
    print(f"m={args.m}, best of {args.repeat}, backends: {', '.join(names)}")
    print(f"{'kernel':<28}" + "".join(f"{n:>12}" for n in names) + (f"{'speedup':>10}" if len(names) > 1 else ""))
    for label, fn in cases.items():
        row, outs = [], []
        for n in names:
            t, out = best_of(lambda: fn(backends[n]), args.repeat)
            row.append(t)
            outs.append(out)
        if len(outs) > 1 and not same(outs[0], outs[1]):
            raise SystemExit(f"backends disagree on {label}")
        line = f"{label:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t in row)
        if len(row) > 1:
            line += f"{row[names.index('python')] / row[names.index('cython')]:>9.1f}x"
        print(line)

    saved = kernels._impl
    row = []
    try:
        for n in names:
            kernels._impl = backends[n]
            t, _ = best_of(lambda: run_estimate(data, "wr", 200, seed=0), 1)
            row.append(t)
    finally:
        kernels._impl = saved
    line = f"{'estimate (wr, n=200)':<28}" + "".join(f"{t:>11.2f}s" for t in row)
    if len(row) > 1:
        line += f"{row[names.index('python')] / row[names.index('cython')]:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
