"""Compare the numba and pure-numpy kernel paths.

    python benchmarks/bench_kernels.py [--repeat 5]

Both kernels are called directly, so the result does not depend on the
RTLKIT_DISABLE_JIT flag. Outputs of the two paths are checked for equality
before timing.
"""

import argparse
import time

import numpy as np

from rtlkit import kernels
from rtlkit._jit import NUMBA_AVAILABLE
from rtlkit.analysis import PerturbationSpec, _scale_draws
from rtlkit.netlist import gen_ripple_adder


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def divider_case(trials=10_000, n=100, vectors=101):
    rng = np.random.default_rng(1)
    g = 1.0 / (1e5 * _scale_draws(n, PerturbationSpec(0.1, n, trials, 1, "independent")))
    g0 = np.full(trials, 1e-5)
    v = (rng.random((n, vectors)) < 0.5).astype(float)
    return g, g0, v


def netlist_case(bits=16, batch=1 << 16):
    n = gen_ripple_adder(bits)
    c = n.compiled()
    rng = np.random.default_rng(2)
    x = rng.integers(0, 2, size=(batch, len(n.inputs)), dtype=np.uint8)

    def fresh():
        values = np.zeros((len(c.net_index), batch), dtype=np.uint8)
        values[c.input_rows] = x.T
        values[c.net_index["const1"]] = 1
        return values

    return c, fresh


def bench_divider(trials, vectors, repeat):
    g, g0, v = divider_case(trials=trials, vectors=vectors)
    row = [f"divider_matrix {trials}x100x{vectors}", best_of(lambda: kernels.divider_matrix_np(g, g0, v), repeat), None]
    if NUMBA_AVAILABLE:
        assert np.allclose(kernels.divider_matrix_np(g, g0, v), kernels.divider_matrix_jit(g, g0, v),
                           rtol=1e-12, atol=0)
        row[2] = best_of(lambda: kernels.divider_matrix_jit(g, g0, v), repeat)
    return row


def bench_netlist(batch, repeat):
    c, fresh = netlist_case(batch=batch)

    def run(kernel):
        vals = fresh()
        kernel(c.ops, c.in_ptr, c.in_idx, c.out_idx, vals)
        return vals

    row = [f"eval_gates adder16 x {batch}", best_of(lambda: run(kernels.eval_gates_np), repeat), None]
    if NUMBA_AVAILABLE:
        assert np.array_equal(run(kernels.eval_gates_np), run(kernels.eval_gates_jit))
        row[2] = best_of(lambda: run(kernels.eval_gates_jit), repeat)
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not NUMBA_AVAILABLE:
        print("numba is not installed; only the numpy path is available")

    rows = []
    for trials, vectors in ((10_000, 101), (200, 4)):
        rows.append(bench_divider(trials, vectors, args.repeat))
    for batch in (1 << 16, 16):
        rows.append(bench_netlist(batch, args.repeat))


    print(f"{'kernel':<32} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name, a, b in rows:
        if b is None:
            print(f"{name:<32} {a * 1e3:>10.2f} {'-':>10} {'-':>8}")
        else:
            print(f"{name:<32} {a * 1e3:>10.2f} {b * 1e3:>10.2f} {a / b:>7.1f}x")


if __name__ == "__main__":
    main()
