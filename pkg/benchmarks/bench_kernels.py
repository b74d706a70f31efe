"""Compare the compiled kernels against the pure-Python fallback.

Runs the fibration flag scans and the associativity scan over codomain
fibrations of growing divisor lattices and reports best-of-N wall times.

    python3 benchmarks/bench_kernels.py [--repeats N] [--sizes 12,60,360]
"""

import argparse
import time

import numpy as np

from fibcat import _kernels_py
from fibcat.constructions import codomain_fibration
from fibcat.corpus import divisor_lattice

try:
    from fibcat import _kernels as _compiled
except ImportError:
    _compiled = None


def flag_inputs(p):
    e, b = p.total, p.base
    return (
        e.src, e.tgt, e.comp, p.proj.mmap, b.src, b.tgt, b.comp,
        e.n_objects, b.n_objects,
    )


def best_of(fn, args, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(sizes, repeats):
    backends = [("python", _kernels_py)]
    if _compiled is not None:
        backends.append((_compiled.BACKEND, _compiled))
    else:
        print("compiled extension not available; timing the fallback only\n")

    header = f"{'kernel':<16} {'input':<18} {'morphisms':>9}"
    for name, _ in backends:
        header += f" {name:>12}"
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    print("-" * len(header))

    for n in sizes:
        base = divisor_lattice(n)
        p, _arr = codomain_fibration(base, max_morphisms=200_000)
        args = flag_inputs(p)
        cat_args = (p.total.comp, p.total.src, p.total.tgt, p.total.n_objects)
        for kernel, getter in (
            ("cocart_flags", lambda mod: mod.cocart_flags),
            ("cart_flags", lambda mod: mod.cart_flags),
            ("assoc_violation", lambda mod: mod.assoc_violation),
        ):
            row = f"{kernel:<16} {'cod(div-%d)' % n:<18} {p.total.n_morphisms:>9}"
            times, results = [], []
            for _, mod in backends:
                a = cat_args if kernel == "assoc_violation" else args
                dt, out = best_of(getter(mod), a, repeats)
                times.append(dt)
                results.append(out)
                row += f" {dt * 1e3:>9.2f} ms"
            if len(results) == 2:
                same = (
                    results[0] == results[1]
                    if kernel == "assoc_violation"
                    else np.array_equal(results[0], results[1])
                )
                if not same:
                    raise SystemExit(f"backend mismatch on {kernel} cod(div-{n})")
                row += f" {times[0] / times[1]:>8.1f}x"
            print(row)
        print()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--sizes", default="12,60,360")
    opts = ap.parse_args()
    run([int(s) for s in opts.sizes.split(",")], opts.repeats)


if __name__ == "__main__":
    main()
