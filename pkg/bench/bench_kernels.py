"""Compare the compiled kernel extension against the pure-Python fallback.

Times the two hot kernels (escape-rate orbit iteration, mod-p orbit
tables) on identical inputs, checks bit-identical agreement, and prints
a speedup table. Run from the repo root:

    python3 bench/bench_kernels.py
"""

import time
from fractions import Fraction

from henonlab import kernels
from henonlab.core import ElementaryHenon, HenonMap, as_numeric_map
from henonlab.green import _KernelMap
from henonlab.periodic import _reduced_arrays
from henonlab.poly import UniPoly


def _bench(fn, reps=3):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _green_batch(impl, km, pts, n_max=2048, tol=1e-9):
    out = []
    for x, y in pts:
        out.append(
            impl.green_escape(
                km.m, km.degs, km.off, km.cre, km.cim, km.cabs,
                km.dre, km.dim, km.dabs, km.abs_lead, km.log_lead,
                km.wfac, float(km.lam), km.r_enter, km.r_switch,
                km.e_bound, km.c_up, x, 0.0, y, 0.0, n_max, tol,
            )
        )
    return out


def main():
    f = HenonMap(
        (
            ElementaryHenon(UniPoly([Fraction(1, 2), 0, 1]), Fraction(1, 2)),
            ElementaryHenon(UniPoly([0, -1, 0, 1]), Fraction(-1, 3)),
        )
    )
    impl_py = kernels.load_backend("python")
    try:
        impl_c = kernels.load_backend("compiled")
    except ImportError:
        print("compiled extension not built; timing the fallback only")
        impl_c = None

    km = _KernelMap(as_numeric_map(f))
    side = 40
    pts = [
        (-3.0 + 6.0 * i / (side - 1), -3.0 + 6.0 * j / (side - 1))
        for i in range(side)
        for j in range(side)
    ]

    print(f"green_escape, {side * side} points, composed degree {km.lam}:")
    t_py, out_py = _bench(lambda: _green_batch(impl_py, km, pts))
    print(f"  python   {t_py * 1e3:8.1f} ms")
    if impl_c is not None:
        t_c, out_c = _bench(lambda: _green_batch(impl_c, km, pts))
        print(f"  compiled {t_c * 1e3:8.1f} ms   ({t_py / t_c:.1f}x)")
        assert out_py == out_c, "backends disagree on green_escape"
        print("  agreement: bit-identical")

    for p in (101, 257, 1009):
        degs, off, cmod, dmod, _good = _reduced_arrays(f, p)
        args = (p, degs, off, cmod, dmod)
        print(f"modp_next_table, p = {p} ({p * p} states):")
        t_py, tab_py = _bench(lambda: impl_py.modp_next_table(*args))
        print(f"  python   {t_py * 1e3:8.1f} ms")
        if impl_c is not None:
            t_c, tab_c = _bench(lambda: impl_c.modp_next_table(*args))
            print(f"  compiled {t_c * 1e3:8.1f} ms   ({t_py / t_c:.1f}x)")
            assert (tab_py == tab_c).all(), "backends disagree on modp_next_table"
            print("  agreement: identical tables")


if __name__ == "__main__":
    main()
