"""Time lattice enumeration with the numba kernels against the numpy fallback.

    python3 benchmarks/bench_enumeration.py [--repeat 3] [--bound 16]

Run with JACOBIVOA_DISABLE_NUMBA=1 to time only the numpy path.
"""

import argparse
import time

import numpy as np

from jacobivoa import _accel, kernels
from jacobivoa.lattice import EvenLattice

CASES = {
    "E8 theta": (EvenLattice.named("E8").gram, (0,) * 8, 1),
    "E8 half-root coset": (EvenLattice.named("E8").gram, (1, 0, 0, 0, 0, 0, 0, 0), 2),
    "A1+E8": (EvenLattice.named("A1+E8").gram, (1,) + (0,) * 8, 2),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--bound", type=int, default=16, help="norm bound in the unscaled lattice")
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if _accel.NUMBA_ENABLED else [])
    print(f"backends: {', '.join(backends)}")
    for name, (gram, shift, d) in CASES.items():
        G = np.array(gram)
        w = np.zeros(len(gram), dtype=np.int64)
        w[0] = 1
        bound = args.bound * d * d
        row = [f"{name:20s}"]
        ref = None
        for b in backends:
            if b == "numba":  # compile outside the timed region
                kernels.theta_histogram(G, shift, d, 4, w, backend=b)
            t, (hist, _) = best_of(lambda: kernels.theta_histogram(G, shift, d, bound, w, backend=b), args.repeat)
            ref = hist if ref is None else ref
            assert np.array_equal(hist, ref), "backends disagree"
            row.append(f"{b} {t * 1e3:9.1f} ms")
        row.append(f"{int(hist.sum())} vectors")
        print("  ".join(row))


if __name__ == "__main__":
    main()
