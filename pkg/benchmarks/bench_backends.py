"""Time the JIT kernels against the pure-numpy fallbacks.

Run:  python3 benchmarks/bench_backends.py [n]

Measures the 7-point Laplacian sweep and the gradient-energy reduction on an
n^3 grid (default 96) for both implementations, then a small clamped solve
through whichever backend is active (set BICAP_BACKEND to switch).
"""

import sys
import time

import numpy as np

from bicap import _kern_numpy
from bicap.backend import backend_name
from bicap.biharm import DirichletProblem, solve_dirichlet
from bicap.fields import voxel_bump_field
from bicap.sphgrid import VoxelGrid

try:
    from bicap import _kern_numba
except ImportError:
    _kern_numba = None


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 96
    rng = np.random.default_rng(0)
    u = rng.standard_normal((n, n, n))
    out = np.zeros_like(u)
    impls = [("numpy", _kern_numpy)]
    if _kern_numba is not None:
        _kern_numba.lap3d(u, 1.0, out)  # trigger compilation outside the timer
        _kern_numba.grad_energy3d(u, 1.0)
        impls.append(("numba", _kern_numba))

    print(f"grid {n}^3, best of 5, active backend: {backend_name()}")
    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name, _ in impls) + f"{'speedup':>10}")
    rows = {}
    for kernel in ("lap3d", "grad_energy3d"):
        rows[kernel] = []
        for _, mod in impls:
            if kernel == "lap3d":
                rows[kernel].append(best_of(lambda m=mod: m.lap3d(u, 1.0, out)))
            else:
                rows[kernel].append(best_of(lambda m=mod: m.grad_energy3d(u, 1.0)))
        cells = "".join(f"{t * 1e3:>10.2f}ms" for t in rows[kernel])
        speed = rows[kernel][0] / rows[kernel][-1]
        print(f"{kernel:<16}{cells}{speed:>9.1f}x")

    grid = VoxelGrid.cube(1.0, 33)
    mask = np.zeros(grid.dims, bool)
    mask[1:-1, 1:-1, 1:-1] = True
    rhs = voxel_bump_field(grid, (0.2, 0.0, 0.1), 0.3).values
    t0 = time.perf_counter()
    sol = solve_dirichlet(DirichletProblem(grid, mask, rhs=rhs, tol=1e-8))
    dt = time.perf_counter() - t0
    print(
        f"clamped solve 33^3 [{backend_name()}]: {dt:.2f}s, "
        f"{sol.stats.iterations} iterations, defect {sol.variational_defect:.2e}"
    )


if __name__ == "__main__":
    main()
