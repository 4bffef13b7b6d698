"""Smooth synthetic fields for quadrature and identity checks.

Everything here is deterministic given a seed.  The annulus fields vanish
identically in a margin at both radial ends (two-layer-zero convention), so
they are admissible for the energy forms without extension tricks.  The
sphere-harmonic catalogue carries analytic angular derivatives, which gives
the eigenvalue checks an independent route that does not go through the
discrete stencils.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sphgrid import AnnulusGrid, ScalarField, VoxelGrid

__all__ = [
    "smooth_bump",
    "smooth_step",
    "Harmonic",
    "HARMONICS",
    "annulus_test_field",
    "voxel_bump_field",
]


def smooth_bump(x, lo: float, hi: float) -> np.ndarray:
    """C-infinity bump supported on (lo, hi), peak value 1 at the midpoint."""
    if not hi > lo:
        raise ValueError("bump needs lo < hi")
    x = np.asarray(x, dtype=float)
    xi = (2.0 * x - (lo + hi)) / (hi - lo)
    out = np.zeros_like(xi)
    inside = np.abs(xi) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi[inside] ** 2))
    return out


def smooth_step(x, lo: float, hi: float) -> np.ndarray:
    """C-infinity cutoff: 1 for x <= lo, 0 for x >= hi, monotone between."""
    if not hi > lo:
        raise ValueError("step needs lo < hi")
    x = np.asarray(x, dtype=float)
    xi = np.clip((x - lo) / (hi - lo), 0.0, 1.0)

    def ramp(t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t)
        pos = t > 0.0
        out[pos] = np.exp(-1.0 / t[pos])
        return out

    up, down = ramp(1.0 - xi), ramp(xi)
    return up / (up + down)


@dataclass(frozen=True)
class Harmonic:
    """A sphere harmonic with analytic colatitude/longitude derivatives."""

    degree: int
    label: str
    value: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dtheta: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def eigenvalue(self) -> float:
        """Eigenvalue of minus the sphere Laplacian: l(l+1)."""
        return float(self.degree * (self.degree + 1))

    def on_grid(self, grid: AnnulusGrid) -> np.ndarray:
        th = grid.theta[:, None]
        ph = grid.phi[None, :]
        return np.broadcast_to(self.value(th, ph), grid.shape[1:]).copy()

    def grad_sq_on_grid(self, grid: AnnulusGrid) -> np.ndarray:
        """|grad_omega Y|^2 = (dY/dtheta)^2 + (dY/dphi)^2 / sin(theta)^2."""
        th = grid.theta[:, None]
        ph = grid.phi[None, :]
        gt = np.broadcast_to(self.dtheta(th, ph), grid.shape[1:])
        gp = np.broadcast_to(self.dphi(th, ph), grid.shape[1:])
        return gt**2 + (gp / np.sin(th)) ** 2


def _z(th, ph):
    return np.cos(th) + 0.0 * ph


HARMONICS: tuple[Harmonic, ...] = (
    Harmonic(
        1, "z",
        value=_z,
        dtheta=lambda th, ph: -np.sin(th) + 0.0 * ph,
        dphi=lambda th, ph: 0.0 * th * ph,
    ),
    Harmonic(
        1, "x",
        value=lambda th, ph: np.sin(th) * np.cos(ph),
        dtheta=lambda th, ph: np.cos(th) * np.cos(ph),
        dphi=lambda th, ph: -np.sin(th) * np.sin(ph),
    ),
    Harmonic(
        2, "3z2-1",
        value=lambda th, ph: (3.0 * np.cos(th) ** 2 - 1.0) / 2.0 + 0.0 * ph,
        dtheta=lambda th, ph: -3.0 * np.cos(th) * np.sin(th) + 0.0 * ph,
        dphi=lambda th, ph: 0.0 * th * ph,
    ),
    Harmonic(
        2, "xz",
        value=lambda th, ph: np.sin(th) * np.cos(th) * np.cos(ph),
        dtheta=lambda th, ph: np.cos(2.0 * th) * np.cos(ph),
        dphi=lambda th, ph: -np.sin(th) * np.cos(th) * np.sin(ph),
    ),
    Harmonic(
        3, "5z3-3z",
        value=lambda th, ph: (5.0 * np.cos(th) ** 3 - 3.0 * np.cos(th)) / 2.0 + 0.0 * ph,
        dtheta=lambda th, ph: -np.sin(th) * (15.0 * np.cos(th) ** 2 - 3.0) / 2.0 + 0.0 * ph,
        dphi=lambda th, ph: 0.0 * th * ph,
    ),
    Harmonic(
        3, "xyz",
        value=lambda th, ph: np.sin(th) ** 2 * np.cos(th) * np.sin(ph) * np.cos(ph),
        dtheta=lambda th, ph: (2.0 * np.sin(th) * np.cos(th) ** 2 - np.sin(th) ** 3)
        * np.sin(ph) * np.cos(ph),
        dphi=lambda th, ph: np.sin(th) ** 2 * np.cos(th) * np.cos(2.0 * ph),
    ),
)


def annulus_test_field(
    grid: AnnulusGrid,
    seed: int,
    n_modes: int = 4,
    margin: float = 0.12,
) -> ScalarField:
    """Random smooth field on the annulus, zero in a margin at both t-ends.

    Sum of radial bumps times low-degree angular factors.  `margin` is the
    fraction of the t-range kept identically zero at each end.
    """
    rng = np.random.default_rng(seed)
    t = grid.t
    t_lo = t[0] + margin * (t[-1] - t[0])
    t_hi = t[-1] - margin * (t[-1] - t[0])
    values = np.zeros(grid.shape)
    for _ in range(n_modes):
        # widths stay a fixed fraction of the range so every mode is
        # resolved on the coarsest grids the tests use
        w = rng.uniform(0.2, 0.45) * (t_hi - t_lo)
        c = rng.uniform(t_lo + w, t_hi - w)
        radial = smooth_bump(t, c - w, c + w)
        harm = HARMONICS[rng.integers(0, len(HARMONICS))]
        amp = rng.uniform(-1.0, 1.0)
        angular = 0.25 * rng.uniform(-1.0, 1.0) + harm.on_grid(grid)
        values += amp * radial[:, None, None] * angular[None, :, :]
    return ScalarField(grid, values)


def voxel_bump_field(
    grid: VoxelGrid,
    center: tuple[float, float, float],
    radius: float,
) -> ScalarField:
    """Radial C-infinity bump around `center`, supported in |x-c| < radius."""
    xs, ys, zs = grid.coords()
    rr = np.sqrt((xs - center[0]) ** 2 + (ys - center[1]) ** 2 + (zs - center[2]) ** 2)
    return ScalarField(grid, smooth_bump(rr, -radius, radius))
