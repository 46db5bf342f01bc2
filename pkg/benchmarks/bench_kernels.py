"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``. Both modules are imported
directly, so the result does not depend on ``AWTSTAT_PURE_PYTHON``.
"""
import argparse
import timeit

import numpy as np

from awtstat import _pykernels

try:
    from awtstat import _ckernels
except ImportError:
    _ckernels = None


def cases(n):
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 50, n)
    z = rng.uniform(0, 0.999, n)
    field = np.exp(-np.add.outer((np.arange(200) - 100.0) ** 2, (np.arange(300) - 150.0) ** 2) / 4e3)
    field += 0.05 * rng.standard_normal(field.shape)
    return {
        "bessel_ie(nu=0)": lambda k: k.bessel_ie(x, 0),
        "bessel_ie(nu=1)": lambda k: k.bessel_ie(x, 1),
        "bessel_k0e": lambda k: k.bessel_k0e(x + 0.01),
        "hyp2f1_33c(c=1)": lambda k: k.hyp2f1_33c(1.0, z),
        "laguerre(k=40)": lambda k: k.laguerre(40, x),
        "marching_segments 200x300": lambda k: k.marching_segments(field, 0.5),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("-n", type=int, default=100_000, help="elementwise problem size")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':28s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(args.n).items():
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:28s} {1e3 * tp:12.2f}")
            continue
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:28s} {1e3 * tp:12.2f} {1e3 * tc:12.2f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
