"""Time the compiled and numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from fqgeom import kernels
from fqgeom.geom import all_coords, norm_grid, random_dense_set


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    for p, d in [(11, 2), (13, 3), (23, 3)]:
        E = random_dense_set(p, d, 0.5, seed=0)
        offsets = all_coords(p, d)[norm_grid(p, d) == 1]
        yield (f"sphere_convolve p={p} d={d} |E|={len(E)}",
               lambda b, E=E, o=offsets, p=p, d=d: kernels.sphere_convolve(E.mask, o, p, d, backend=b))
    for p, d, rho in [(7, 2, 1.0), (11, 2, 0.6), (7, 3, 0.3)]:
        E = random_dense_set(p, d, rho, seed=0)
        coords = E.coords()
        yield (f"census_scan k=2 p={p} d={d} |E|={len(E)}",
               lambda b, c=coords, p=p: kernels.census_scan(c, p, 2, backend=b))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = list(kernels.BACKENDS)
    print(f"backends: {', '.join(names)}")
    print(f"{'case':44s}" + "".join(f"{n:>12s}" for n in names) + "   speedup")
    for label, run in cases():
        times, outs = [], []
        for b in names:
            t, out = best_of(lambda: run(b), args.repeat)
            times.append(t)
            outs.append(out)
        for o in outs[1:]:
            if isinstance(o, tuple):
                assert np.array_equal(outs[0][0], o[0]) and outs[0][1] == o[1], label
            else:
                assert np.array_equal(outs[0], o), f"backends disagree on {label}"
        t = dict(zip(names, times))
        speed = f"{t['python'] / t['cython']:8.1f}x" if len(t) > 1 else ""
        print(f"{label:44s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
