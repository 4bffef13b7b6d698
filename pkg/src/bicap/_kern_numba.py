"""JIT-compiled hot kernels: 7-point Laplacian sweeps dominate every solve."""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True, fastmath=False)
def lap3d(u, inv_h2, out):
    """7-point Laplacian on interior nodes; the one-node shell of ``out`` is
    left untouched (callers keep it zero)."""
    nx, ny, nz = u.shape
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            for k in range(1, nz - 1):
                out[i, j, k] = (
                    u[i - 1, j, k]
                    + u[i + 1, j, k]
                    + u[i, j - 1, k]
                    + u[i, j + 1, k]
                    + u[i, j, k - 1]
                    + u[i, j, k + 1]
                    - 6.0 * u[i, j, k]
                ) * inv_h2


@njit(cache=True, fastmath=False)
def grad_energy3d(u, h):
    """Sum of squared forward differences over all faces, times h (so the
    result is the discrete Dirichlet energy  h^3 * sum |grad u|^2)."""
    nx, ny, nz = u.shape
    acc = 0.0
    for i in range(nx - 1):
        for j in range(ny - 1):
            for k in range(nz - 1):
                c = u[i, j, k]
                dx = u[i + 1, j, k] - c
                dy = u[i, j + 1, k] - c
                dz = u[i, j, k + 1] - c
                acc += dx * dx + dy * dy + dz * dz
    return acc * h
