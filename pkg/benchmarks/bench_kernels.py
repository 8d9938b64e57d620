"""Numba kernels versus the pure numpy/python fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on a
representative workload with both backends and the outputs are compared.
"""
import argparse
import time

import numpy as np

from xyqubits import _kernels as K
from xyqubits import generators as G
from xyqubits import operators as ops
from xyqubits.model import SystemParams
from xyqubits.scenarios import Drive


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads():
    p = SystemParams(J=0.1)
    gen = G.build_driven(G.build_me4(p), 10.0, Drive().frequency(p))
    M = np.ascontiguousarray(gen.matrix)
    y0 = ops.projector("gg").reshape(-1).astype(complex)
    t = np.linspace(0.0, 20 / p.gamma_single, 1000)
    P = np.ascontiguousarray(np.linalg.matrix_power(np.eye(16) + M * 1e-3, 10))
    O = np.ascontiguousarray(np.stack([ops.S1M.T.reshape(-1), ops.S2M.T.reshape(-1)]).astype(complex))
    f = np.exp(-(0.05 + 3j) * np.arange(200_000) * 0.01)
    w = K.quadrature_weights(f.size, 0.01)
    nu = np.linspace(-10, 10, 2000)
    return {
        "dopri_linear": (K.dopri_linear_py, getattr(K, "dopri_linear_nb", None),
                         (M, y0, t, 1e-8, 1e-10, 1e-2, np.inf, 5_000_000, 4), lambda r: r[0]),
        "rk4_linear": (K.rk4_linear_py, getattr(K, "rk4_linear_nb", None), (M, y0, t[:200], 0.02), lambda r: r),
        "propagate_observe": (K.propagate_observe_py, getattr(K, "propagate_observe_nb", None),
                              (P, y0, O, 100_000), lambda r: r),
        "fourier": (K.fourier_py, getattr(K, "fourier_nb", None), (f, w, 0.01, nu), lambda r: r),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<18} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8} {'max|diff|':>10}")
    for name, (py, nb, fargs, pick) in workloads().items():
        t_py, r_py = best_of(lambda: py(*fargs), args.repeat)
        if nb is None:
            print(f"{name:<18} {t_py:10.4f} {'n/a':>10}")
            continue
        nb(*fargs)  # compile outside the timing
        t_nb, r_nb = best_of(lambda: nb(*fargs), args.repeat)
        diff = float(np.max(np.abs(pick(r_py) - pick(r_nb))))
        print(f"{name:<18} {t_py:10.4f} {t_nb:10.4f} {t_py / t_nb:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
