#!/usr/bin/env python3
"""Benchmark: compiled integration kernel vs the pure-python fallback.

Times the workloads that dominate real runs: repeated phi continuations of
the kind a domain sweep performs, a revolution-surface joint continuation,
and a long chart flow with frame transport.  Run after `pip install -e .`;
prints one row per workload with the speedup of the compiled kernel.
"""

import time

import numpy as np

from geopol._kernel import _pykernel

try:
    from geopol._kernel import _ckernel
except ImportError:
    _ckernel = None


def workload_sweep(kernel, n_sigma=60):
    """Hyperbolic phi continuations along the imaginary axis (sweep slice)."""
    eye2 = np.eye(2)
    fund = np.concatenate([np.hstack([eye2, 0 * eye2]).ravel(),
                           np.hstack([0 * eye2, eye2]).ravel()]).astype(complex)
    ip = np.array([2, 4])
    fp = np.diag([0.0, -1.0]).ravel()
    for sigma in np.linspace(0.05, 1.5, n_sigma):
        status, *_ = kernel.integrate_path(
            0, ip, fp, fund, np.array([0.0, sigma * 1j], dtype=complex))
        assert status == 0


def workload_revolution(kernel, reps=20):
    """Joint geodesic + Jacobi continuation on the torus profile."""
    eye2 = np.eye(2)
    fund = np.concatenate([np.hstack([eye2, 0 * eye2]).ravel(),
                           np.hstack([0 * eye2, eye2]).ravel()]).astype(complex)
    geo = np.array([0.3, 0.2, 0.4, 0.2], dtype=complex)
    y0 = np.concatenate([geo, fund])
    ip = np.array([2, 1, 4])
    fp = np.array([0.2, 3.0])
    for _ in range(reps):
        status, *_ = kernel.integrate_path(
            1, ip, fp, y0, np.array([0.0, 0.5 + 0.9j], dtype=complex))
        assert status == 0


def workload_chart_flow(kernel, reps=10):
    """Hyperbolic-plane chart flow with frame transport, t = 10."""
    y0 = np.concatenate([[0.2, -0.1], [0.5, 0.3], np.eye(2).ravel()]).astype(complex)
    ip = np.array([2])
    fp = np.array([-1.0])
    for _ in range(reps):
        status, *_ = kernel.integrate_path(
            2, ip, fp, y0, np.array([0.0, 10.0], dtype=complex))
        assert status == 0


def timed(fn, kernel):
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        fn(kernel)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    workloads = [
        ("sweep slice (60 continuations)", workload_sweep),
        ("revolution joint continuation (x20)", workload_revolution),
        ("chart flow with frame, t=10 (x10)", workload_chart_flow),
    ]
    print(f"{'workload':40s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, fn in workloads:
        t_py = timed(fn, _pykernel)
        if _ckernel is None:
            print(f"{label:40s} {t_py * 1e3:9.1f}ms {'n/a':>10s} {'n/a':>8s}")
            continue
        t_c = timed(fn, _ckernel)
        print(f"{label:40s} {t_py * 1e3:9.1f}ms {t_c * 1e3:9.1f}ms "
              f"{t_py / t_c:7.1f}x")
    if _ckernel is None:
        print("\ncompiled kernel not built; install with a working C toolchain "
              "to compare.")


if __name__ == "__main__":
    main()
