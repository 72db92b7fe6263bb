"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on identical inputs in both backends; outputs are
checked for agreement before timing.
"""

import argparse
import timeit

import numpy as np

from sl2orbit import kernels
from sl2orbit.core import random_tuple


def cases(rng):
    mats = np.ascontiguousarray(random_tuple(8, 1).matrices)
    idx = rng.integers(0, 8, 4000).astype(np.int_)
    offsets = np.arange(0, 4001, 8).astype(np.int_)
    short = idx[:40]
    g = np.ascontiguousarray(random_tuple(1, 2).matrices[0])
    ginv = np.ascontiguousarray(np.linalg.inv(g))
    return {
        "chain_product (40 letters)": ("chain_product", (mats, short)),
        "chain_traces (500 words x 8)": ("chain_traces", (mats, idx, offsets)),
        "lex_traces (n=8)": ("lex_traces", (mats,)),
        "conjugate_all (n=8)": ("conjugate_all", (g, ginv, mats)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=50)
    args = ap.parse_args(argv)

    names = kernels.available_backends()
    if "cython" not in names:
        print("compiled backend not built; only the Python fallback is available")
    backends = {name: kernels.get_backend(name) for name in names}

    print(f"{'kernel':32s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, (fn, inputs) in cases(np.random.default_rng(0)).items():
        outs = [getattr(b, fn)(*inputs) for b in backends.values()]
        for o in outs[1:]:
            assert np.allclose(o, outs[0], rtol=1e-10, atol=1e-10 * np.abs(outs[0]).max()), f"{fn}: backends disagree"
        times = []
        for b in backends.values():
            f = getattr(b, fn)
            t = min(timeit.repeat(lambda: f(*inputs), number=args.number, repeat=args.repeat))
            times.append(t / args.number)
        row = f"{label:32s}" + "".join(f"{t * 1e6:11.1f} us" for t in times)
        if len(times) > 1:
            row += f"{times[1] / times[0]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
