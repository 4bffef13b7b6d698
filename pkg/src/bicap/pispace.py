"""The four-dimensional profile space spanned by {1, x1/|x|, x2/|x|, x3/|x|}.

Profiles are degree-(0,1) spherical-harmonic combinations.  They show up as
boundary data for the constrained energy minimization and as the null space
of the annular energy form: the sphere Laplacian sends each coordinate
function to -2 times itself, so the angular groups of the form cancel on
profiles.  This module provides evaluation (plain and lifted by |x|),
closed-form sphere L2 norms, and the low-order projection of an annulus
field onto the span.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sphgrid import AnnulusGrid, ScalarField

__all__ = ["PiProfile", "project_to_pi"]


@dataclass(frozen=True)
class PiProfile:
    """Angular profile  b0 + b1*x1/|x| + b2*x2/|x| + b3*x3/|x|."""

    b: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        arr = np.asarray(self.b, dtype=float)
        if arr.shape != (4,):
            raise ValueError("profile needs exactly four coefficients")
        if not np.all(np.isfinite(arr)):
            raise ValueError("profile coefficients must be finite")
        object.__setattr__(self, "b", tuple(float(c) for c in arr))

    # -- basic algebra ----------------------------------------------------

    @property
    def b0(self) -> float:
        return self.b[0]

    @property
    def bvec(self) -> np.ndarray:
        return np.asarray(self.b[1:], dtype=float)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.b))

    def normalized(self) -> "PiProfile":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero profile")
        return PiProfile(tuple(c / n for c in self.b))

    def __add__(self, other: "PiProfile") -> "PiProfile":
        return PiProfile(tuple(a + b for a, b in zip(self.b, other.b)))

    def __sub__(self, other: "PiProfile") -> "PiProfile":
        return PiProfile(tuple(a - b for a, b in zip(self.b, other.b)))

    def __mul__(self, s: float) -> "PiProfile":
        return PiProfile(tuple(float(s) * c for c in self.b))

    __rmul__ = __mul__

    # -- evaluation -------------------------------------------------------

    def eval(self, x) -> np.ndarray | float:
        """Value at Cartesian points, shape (..., 3).  Undefined at 0."""
        pts = np.asarray(x, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[-1] != 3:
            raise ValueError("points must have a trailing dimension of 3")
        r = np.linalg.norm(pts, axis=-1)
        if np.any(r == 0.0):
            raise ValueError("profile is undefined at the origin")
        vals = self.b[0] + (pts @ self.bvec) / r
        return float(vals[0]) if scalar else vals

    def eval_lifted(self, x) -> np.ndarray | float:
        """|x| * eval(x), extended by continuity to 0 at the origin."""
        pts = np.asarray(x, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[-1] != 3:
            raise ValueError("points must have a trailing dimension of 3")
        r = np.linalg.norm(pts, axis=-1)
        vals = self.b[0] * r + pts @ self.bvec
        return float(vals[0]) if scalar else vals

    def eval_on_sphere(self, grid: AnnulusGrid) -> np.ndarray:
        """Values on the grid's angular nodes, shape (n_theta, n_phi)."""
        return self.b[0] + grid.unit_vectors() @ self.bvec

    def as_field(self, grid: AnnulusGrid) -> ScalarField:
        """The profile lifted to the full annulus grid (constant in radius)."""
        sphere = self.eval_on_sphere(grid)
        return ScalarField(grid, np.broadcast_to(sphere, grid.shape).copy())

    # -- structural operations ---------------------------------------------

    def laplace_beltrami_action(self) -> "PiProfile":
        """Sphere Laplacian of the profile: constants die, directions scale by -2."""
        return PiProfile((0.0, -2.0 * self.b[1], -2.0 * self.b[2], -2.0 * self.b[3]))

    def sphere_l2_sq(self) -> float:
        """Integral of the squared profile over the unit sphere.

        The constant carries weight 4*pi, each direction 4*pi/3, and the
        cross terms integrate to zero by parity.
        """
        b0, b1, b2, b3 = self.b
        return 4.0 * math.pi * b0 * b0 + (4.0 * math.pi / 3.0) * (b1 * b1 + b2 * b2 + b3 * b3)


def _angular_coefficients(field: ScalarField) -> np.ndarray:
    """Per-radius coefficients of a log-grid field in the {1, w1, w2, w3} basis.

    Returns shape (n_t, 4).  Solves the small Gram system of the basis under
    the grid's sphere quadrature; with the offset-node rule the Gram is
    diagonal to machine precision, but solving keeps the projection exact
    even if the quadrature degrades.
    """
    grid = field.grid
    omega = grid.unit_vectors()  # (n_theta, n_phi, 3)
    basis = np.concatenate(
        [np.ones(grid.shape[1:] + (1,)), omega], axis=-1
    )  # (n_theta, n_phi, 4)
    w = grid.sphere_w[:, None, None]  # (n_theta, 1, 1)
    gram = np.einsum("tpa,tpb->ab", basis * w, basis)
    rhs = np.einsum("rtp,tpa->ra", field.values, basis * w)
    return np.linalg.solve(gram, rhs.T).T


def project_to_pi(field: ScalarField) -> PiProfile:
    """Best constant-plus-direction profile for an annulus field.

    Angular part: quadrature projection onto {1, x/|x|} slice by slice.
    Radial part: plain average of each coefficient over the radius, i.e.
    with weight dr = e^{-t} dt on the log axis (trapezoid rule).  A field
    that already is a profile is reproduced exactly.
    """
    grid = field.grid
    if not isinstance(grid, AnnulusGrid):
        raise TypeError("projection requires a field on an annulus grid")
    coeffs = _angular_coefficients(field)  # (n_t, 4)
    wr = grid.wt_t * np.exp(-grid.t)  # trapezoid in r, expressed on the t axis
    sigma = (wr @ coeffs) / wr.sum()
    return PiProfile(tuple(sigma))
