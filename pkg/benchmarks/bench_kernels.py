"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``. Each row reports the best of
several repeats for both backends and the speed-up.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from hdslice._backend import BACKENDS
from hdslice.rpoly import RPoly, sturm_chain


def jacobi_case(n, t, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, t)) + 1j * rng.standard_normal((n, t))

    def run(k):
        R = np.ascontiguousarray(A.copy())
        Jt = np.ascontiguousarray(np.eye(n, dtype=np.complex128))
        k.jacobi_rows(R, Jt, 5e-16 * max(n, t), 80)
    return run


def sturm_case(degree, seed=0):
    rng = np.random.default_rng(seed)
    roots = np.sort(rng.uniform(-3, 3, degree))
    ch = sturm_chain(RPoly(np.polynomial.polynomial.polyfromroots(roots)))

    def run(k):
        k.isolate_roots(ch.seq, ch.degs, -4.0, 4.0, 1e-14)
        for x in np.linspace(-4, 4, 200):
            k.sign_variations(ch.seq, ch.degs, float(x))
    return run


CASES = {
    "jacobi 4x6": jacobi_case(4, 6),
    "jacobi 16x16": jacobi_case(16, 16),
    "jacobi 32x48": jacobi_case(32, 48),
    "sturm deg 4": sturm_case(4),
    "sturm deg 12": sturm_case(12),
}


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if "compiled" not in BACKENDS:
        print("compiled extension not built; only the Python kernels are available")
    names = sorted(BACKENDS)
    print(f"{'case':<14}" + "".join(f"{n:>14}" for n in names) + (f"{'speed-up':>10}" if len(names) == 2 else ""))
    for label, case in CASES.items():
        best = {}
        for name in names:
            k = BACKENDS[name]
            timer = timeit.Timer(lambda: case(k))
            number, _ = timer.autorange()
            best[name] = min(timer.repeat(args.repeat, number)) / number
        row = f"{label:<14}" + "".join(f"{best[n] * 1e3:>11.3f} ms" for n in names)
        if len(names) == 2:
            row += f"{best['python'] / best['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
