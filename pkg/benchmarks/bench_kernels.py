"""Benchmark the compiled kernel extension against the pure-NumPy fallback.

Two workloads:
  * scalar: repeated single-point calls, the pattern adaptive quadrature
    (scipy.integrate.quad callbacks) produces;
  * vector: one call on a large grid, the pattern the fixed-point solvers
    produce.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

import bosetrap._kernels_py as kpy

try:
    import bosetrap._kernels_cy as kcy
except ImportError:
    kcy = None


def time_call(fn, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def scalar_workload(mod, n=20000):
    ts = np.linspace(0.01, 20.0, n)

    def run():
        acc = 0.0
        for t in ts:
            acc += mod.eta(t) + mod.li_exp(2.5, t)
        return acc

    return run


def vector_workload(mod, n=400000):
    ts = np.linspace(0.01, 20.0, n)

    def run():
        return mod.eta(ts) + mod.li_exp(2.5, ts) + mod.bose_f(ts)

    return run


def main():
    backends = [("python", kpy)]
    if kcy is not None:
        backends.append(("cython", kcy))
    print(f"{'workload':<10} {'backend':<8} {'time':>10}  speedup")
    rows = {}
    for label, maker in [("scalar", scalar_workload), ("vector", vector_workload)]:
        for name, mod in backends:
            rows[(label, name)] = time_call(maker(mod))
        base = rows[(label, "python")]
        for name, _ in backends:
            t = rows[(label, name)]
            print(f"{label:<10} {name:<8} {t * 1e3:9.1f}ms  {base / t:6.2f}x")


if __name__ == "__main__":
    main()
