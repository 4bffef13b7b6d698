"""Pure-numpy fallbacks for the hot kernels (same contracts as _kern_numba)."""

import numpy as np

NAME = "numpy"


def lap3d(u, inv_h2, out):
    out[1:-1, 1:-1, 1:-1] = (
        u[:-2, 1:-1, 1:-1]
        + u[2:, 1:-1, 1:-1]
        + u[1:-1, :-2, 1:-1]
        + u[1:-1, 2:, 1:-1]
        + u[1:-1, 1:-1, :-2]
        + u[1:-1, 1:-1, 2:]
        - 6.0 * u[1:-1, 1:-1, 1:-1]
    ) * inv_h2


def grad_energy3d(u, h):
    dx = u[1:, :-1, :-1] - u[:-1, :-1, :-1]
    dy = u[:-1, 1:, :-1] - u[:-1, :-1, :-1]
    dz = u[:-1, :-1, 1:] - u[:-1, :-1, :-1]
    return (np.sum(dx * dx) + np.sum(dy * dy) + np.sum(dz * dz)) * h
