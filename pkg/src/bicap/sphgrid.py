"""Grids, coordinates and discrete operators.

Two grid families carry everything in this package:

* ``VoxelGrid`` — uniform Cartesian nodes; 7-point Laplacian, its square
  (the 13-point clamped bilaplacian arises by applying it twice against a
  two-layer zero exterior), central gradients, and rasterization of
  compacta.
* ``AnnulusGrid`` — logarithmic-radial product grid (t, theta, phi) with
  t = log(1/r) uniform, theta nodes offset half a step from the poles, phi
  periodic.  The theta nodes are Fejér-1 points in cos(theta), so the sphere
  quadrature integrates polynomial integrands of degree < n_theta exactly;
  that is what makes the low-mode projections and closed-form sphere
  integrals in this package hit tight tolerances honestly.

Conventions
-----------
theta in [0, pi] is the polar angle from +z, phi in [0, 2pi).  Fields are
arrays indexed [i_t, i_theta, i_phi] on annulus grids and [ix, iy, iz] on
voxel grids.  "Two-layer zero" exterior: a field belonging to the discrete
clamped space vanishes outside its domain mask, and energies sum the
Laplacian over every node where the stencil reaches a domain value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .backend import lap3d

__all__ = [
    "SphericalPoint",
    "LogPoint",
    "to_log_coords",
    "from_log_coords",
    "VoxelGrid",
    "AnnulusGrid",
    "ScalarField",
    "fejer1_weights",
    "CompactumSpec",
    "PointSet",
    "CuspLayer",
    "ConeSection",
    "VoxelMask",
    "rasterize",
    "laplacian",
    "bilaplacian",
    "gradient",
    "kelvin_transform",
    "dump_field",
    "load_field",
]


# --------------------------------------------------------------------------
# coordinates


@dataclass(frozen=True)
class SphericalPoint:
    r: float
    theta: float
    phi: float

    def cartesian(self) -> np.ndarray:
        st = np.sin(self.theta)
        return self.r * np.array(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)]
        )


@dataclass(frozen=True)
class LogPoint:
    """Log-radial image of a point: t = log(1/r), same angles."""

    t: float
    theta: float
    phi: float

    def to_spherical(self) -> SphericalPoint:
        return SphericalPoint(float(np.exp(-self.t)), self.theta, self.phi)


def to_log_coords(xyz: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Map Cartesian points (..., 3) to (t, theta, phi); the origin is excluded."""
    xyz = np.asarray(xyz, dtype=np.float64)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    if np.any(r == 0.0):
        raise ValueError("log coordinates are undefined at the origin")
    theta = np.arccos(np.clip(z / r, -1.0, 1.0))
    phi = np.mod(np.arctan2(y, x), 2.0 * np.pi)
    return -np.log(r), theta, phi


def from_log_coords(t, theta, phi) -> np.ndarray:
    t, theta, phi = np.broadcast_arrays(
        np.asarray(t, float), np.asarray(theta, float), np.asarray(phi, float)
    )
    r = np.exp(-t)
    st = np.sin(theta)
    return np.stack(
        [r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta)], axis=-1
    )


# --------------------------------------------------------------------------
# voxel grid


@dataclass(frozen=True)
class VoxelGrid:
    """Uniform node-centred Cartesian grid: node (i,j,k) sits at origin + h*(i,j,k)."""

    origin: tuple[float, float, float]
    h: float
    dims: tuple[int, int, int]

    @staticmethod
    def cube(half: float, n: int) -> "VoxelGrid":
        """Centred cube [-half, half]^3 with n nodes per axis (odd n puts a
        node exactly at the origin)."""
        h = 2.0 * half / (n - 1)
        return VoxelGrid((-half, -half, -half), h, (n, n, n))

    @property
    def n_nodes(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(
            self.origin[a] + self.h * np.arange(self.dims[a]) for a in range(3)
        )

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Full node coordinate arrays (open meshgrid broadcastable to dims)."""
        ax, ay, az = self.axes()
        return (
            ax[:, None, None],
            ay[None, :, None],
            az[None, None, :],
        )

    def radius(self) -> np.ndarray:
        x, y, z = self.coords()
        return np.sqrt(x * x + y * y + z * z)

    def nearest_index(self, p: Sequence[float]) -> tuple[int, int, int]:
        idx = []
        for a in range(3):
            i = int(round((p[a] - self.origin[a]) / self.h))
            if not 0 <= i < self.dims[a]:
                raise ValueError(f"point {p} falls outside the grid along axis {a}")
            idx.append(i)
        return tuple(idx)

    def node(self, idx: Sequence[int]) -> np.ndarray:
        return np.array([self.origin[a] + self.h * idx[a] for a in range(3)])


# --------------------------------------------------------------------------
# annulus grid


def fejer1_weights(n: int) -> np.ndarray:
    """Fejér's first quadrature weights for nodes mu_k = cos((k+1/2)pi/n).

    Positive, sum to 2, exact for polynomials in mu of degree <= n-1.
    """
    k = np.arange(n)
    theta = (k + 0.5) * np.pi / n
    m = np.arange(1, n // 2 + 1)
    terms = np.cos(2.0 * np.outer(m, theta)) / (4.0 * m[:, None] ** 2 - 1.0)
    return (2.0 / n) * (1.0 - 2.0 * terms.sum(axis=0))


@dataclass
class AnnulusGrid:
    """Product grid on the annulus r_inner < |x| < r_outer in (t, theta, phi).

    t ascends from log(1/r_outer) to log(1/r_inner) over n_t nodes (so the
    radius *descends* along axis 0).  n_phi must be even so that pole
    reflection (theta -> -theta, phi -> phi + pi) lands on grid columns.
    """

    r_inner: float
    r_outer: float
    n_t: int
    n_theta: int
    n_phi: int

    def __post_init__(self):
        if not 0.0 < self.r_inner < self.r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        if self.n_phi % 2:
            raise ValueError("n_phi must be even (pole reflection)")
        if min(self.n_t, self.n_theta, self.n_phi) < 4:
            raise ValueError("grid too small")
        self.t = np.linspace(
            -np.log(self.r_outer), -np.log(self.r_inner), self.n_t
        )
        self.dt = self.t[1] - self.t[0]
        self.r = np.exp(-self.t)
        self.theta = (np.arange(self.n_theta) + 0.5) * np.pi / self.n_theta
        self.dtheta = np.pi / self.n_theta
        self.sin_theta = np.sin(self.theta)
        self.cos_theta = np.cos(self.theta)
        self.phi = np.arange(self.n_phi) * 2.0 * np.pi / self.n_phi
        self.dphi = 2.0 * np.pi / self.n_phi
        # sphere weights: Fejér-1 in mu = cos(theta) times uniform phi
        self.w_theta = fejer1_weights(self.n_theta)
        self.sphere_w = self.w_theta * self.dphi  # per (theta) row, any phi
        # trapezoid in t
        wt = np.full(self.n_t, self.dt)
        wt[0] = wt[-1] = 0.5 * self.dt
        self.wt_t = wt
        # half-node metric for the flux-form Laplace-Beltrami stencil
        self.s_half = np.sin(self.theta[:-1] + 0.5 * self.dtheta)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_t, self.n_theta, self.n_phi)

    def unit_vectors(self) -> np.ndarray:
        """omega(theta, phi) as an array (n_theta, n_phi, 3)."""
        st, ct = self.sin_theta[:, None], self.cos_theta[:, None]
        cp, sp = np.cos(self.phi)[None, :], np.sin(self.phi)[None, :]
        return np.stack([st * cp, st * sp, ct * np.ones_like(cp)], axis=-1)

    def cartesian(self) -> np.ndarray:
        """Node coordinates (n_t, n_theta, n_phi, 3)."""
        return self.r[:, None, None, None] * self.unit_vectors()[None]

    # -- quadratures -------------------------------------------------------

    def sphere_integral(self, v2d: np.ndarray) -> float:
        """Integrate over S^2 a field sampled as (n_theta, n_phi)."""
        return float(np.einsum("kj,k->", v2d, self.sphere_w))

    def volume_weights(self) -> np.ndarray:
        """dx = e^{-3t} dt domega as node weights, shape (n_t, n_theta, 1)."""
        return (
            np.exp(-3.0 * self.t)[:, None, None]
            * self.wt_t[:, None, None]
            * self.sphere_w[None, :, None]
        )

    def tomega_weights(self) -> np.ndarray:
        """dt domega node weights (for forms set in log coordinates)."""
        return self.wt_t[:, None, None] * self.sphere_w[None, :, None]

    # -- stencils ----------------------------------------------------------

    def d_dt(self, v: np.ndarray, order: int = 1) -> np.ndarray:
        if order == 1:
            return np.gradient(v, self.dt, axis=0, edge_order=2)
        if order != 2:
            raise ValueError("order must be 1 or 2")
        out = np.empty_like(v)
        inv = 1.0 / self.dt**2
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) * inv
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) * inv
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) * inv
        return out

    def _pad_theta(self, v: np.ndarray) -> np.ndarray:
        """Reflect across both poles: (t, n_theta+2, phi)."""
        half = self.n_phi // 2
        lo = np.roll(v[:, :1, :], half, axis=2)
        hi = np.roll(v[:, -1:, :], half, axis=2)
        return np.concatenate([lo, v, hi], axis=1)

    def d_dtheta(self, v: np.ndarray) -> np.ndarray:
        p = self._pad_theta(v)
        return (p[:, 2:, :] - p[:, :-2, :]) / (2.0 * self.dtheta)

    def d_dphi(self, v: np.ndarray) -> np.ndarray:
        return (np.roll(v, -1, axis=2) - np.roll(v, 1, axis=2)) / (2.0 * self.dphi)

    def lb_apply(self, v: np.ndarray) -> np.ndarray:
        """Discrete Laplace-Beltrami, flux form.

        The theta part conserves flux with zero flux through the poles and is
        self-adjoint with respect to the sin(theta) metric; the phi part is
        the standard periodic second difference.  Truncation is O(h^2) away
        from the poles and O(h) on the two pole rows, whose quadrature weight
        is O(h^2) — so the operator converges at second order in the
        quadrature-weighted L2 norm, which is the norm every energy form
        consumes it through.
        """
        out = np.zeros_like(v)
        flux = self.s_half[None, :, None] * (v[:, 1:, :] - v[:, :-1, :])
        out[:, :-1, :] += flux
        out[:, 1:, :] -= flux
        out /= self.dtheta**2 * self.sin_theta[None, :, None]
        out += (np.roll(v, -1, axis=2) - 2.0 * v + np.roll(v, 1, axis=2)) / (
            self.dphi**2 * self.sin_theta[None, :, None] ** 2
        )
        return out

    def grad_omega_sq(self, v: np.ndarray) -> np.ndarray:
        """|grad_omega v|^2 = (d_theta v)^2 + (d_phi v / sin theta)^2."""
        gt = self.d_dtheta(v)
        gp = self.d_dphi(v) / self.sin_theta[None, :, None]
        return gt * gt + gp * gp

    def laplacian(self, v: np.ndarray) -> np.ndarray:
        """3-D Laplacian of the field v(t, omega) = u(x):  e^{2t}(v_tt - v_t + LB v)."""
        return np.exp(2.0 * self.t)[:, None, None] * (
            self.d_dt(v, 2) - self.d_dt(v, 1) + self.lb_apply(v)
        )


# --------------------------------------------------------------------------
# fields


@dataclass
class ScalarField:
    """Values sampled on a grid; treated as immutable by every operation."""

    grid: "VoxelGrid | AnnulusGrid"
    values: np.ndarray

    def __post_init__(self):
        want = self.grid.dims if isinstance(self.grid, VoxelGrid) else self.grid.shape
        if tuple(self.values.shape) != tuple(want):
            raise ValueError(f"values shape {self.values.shape} != grid {want}")


def laplacian(f: ScalarField) -> ScalarField:
    """Discrete Laplacian.  Voxel: 7-point on interior nodes (zero on the
    outermost shell).  Annulus: log-coordinate form, one-sided at t ends."""
    if isinstance(f.grid, AnnulusGrid):
        return ScalarField(f.grid, f.grid.laplacian(f.values))
    out = np.zeros_like(f.values)
    lap3d(f.values, 1.0 / f.grid.h**2, out)
    return ScalarField(f.grid, out)


def bilaplacian(f: ScalarField) -> ScalarField:
    """Laplacian applied twice (voxel: the 13-point composition, valid two
    nodes in from the boundary)."""
    return laplacian(laplacian(f))


def gradient(f: ScalarField) -> np.ndarray:
    """Central-difference gradient of a voxel field, shape (3, *dims)."""
    if not isinstance(f.grid, VoxelGrid):
        raise TypeError("gradient is defined for voxel fields")
    g = np.gradient(f.values, f.grid.h, edge_order=2)
    return np.stack(g, axis=0)


# --------------------------------------------------------------------------
# compacta and rasterization


class CompactumSpec:
    """Geometric description of a compact set; subclasses implement raw node
    membership, `rasterize` adds the one-cell dilation that realises the
    "boundary data in a neighbourhood" convention."""

    def raw_mask(self, grid: VoxelGrid) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class PointSet(CompactumSpec):
    """Finite union of closed balls; radius 0 keeps just the nearest node."""

    points: tuple[tuple[float, float, float], ...]
    radius: float = 0.0

    def raw_mask(self, grid: VoxelGrid) -> np.ndarray:
        mask = np.zeros(grid.dims, dtype=bool)
        x, y, z = grid.coords()
        for p in self.points:
            mask[grid.nearest_index(p)] = True
            if self.radius > 0.0:
                d2 = (x - p[0]) ** 2 + (y - p[1]) ** 2 + (z - p[2]) ** 2
                mask |= d2 <= self.radius**2
        return mask


@dataclass(frozen=True)
class CuspLayer(CompactumSpec):
    """Solid of revolution around +z:  { r_lo <= |x| <= r_hi, theta <= h(|x|) }.

    ``profile`` maps radius to the polar half-angle of the solid part (the
    complement of a cusp-shaped domain inside the layer).
    """

    profile: Callable[[np.ndarray], np.ndarray]
    r_lo: float
    r_hi: float

    def raw_mask(self, grid: VoxelGrid) -> np.ndarray:
        x, y, z = grid.coords()
        r = np.sqrt(x * x + y * y + z * z)
        with np.errstate(invalid="ignore", divide="ignore"):
            ct = np.where(r > 0.0, z / np.maximum(r, 1e-300), 1.0)
        theta = np.arccos(np.clip(ct, -1.0, 1.0))
        band = (r >= self.r_lo) & (r <= self.r_hi)
        return band & (theta <= self.profile(np.maximum(r, self.r_lo)))

    def solid_volume(self, samples: int = 4096) -> float:
        """Analytic-oracle volume: int_{r_lo}^{r_hi} 2 pi (1 - cos h(r)) r^2 dr."""
        r = np.linspace(self.r_lo, self.r_hi, samples)
        f = 2.0 * np.pi * (1.0 - np.cos(self.profile(r))) * r * r
        return float(np.trapezoid(f, r))


@dataclass(frozen=True)
class ConeSection(CompactumSpec):
    """Slab around the homogeneous surface b0|x| + b.x = 0 inside an annulus.

    A node belongs to the raw mask when its estimated distance to the surface
    is below max(thickness/2, h/2), so thickness 0 picks up exactly the nodes
    the surface threads through.
    """

    b: tuple[float, float, float, float]
    r_lo: float
    r_hi: float
    thickness: float = 0.0

    def raw_mask(self, grid: VoxelGrid) -> np.ndarray:
        b0, b1, b2, b3 = self.b
        x, y, z = grid.coords()
        r = np.sqrt(x * x + y * y + z * z)
        safe_r = np.maximum(r, 1e-300)
        fval = b0 * r + b1 * x + b2 * y + b3 * z
        gx = b0 * x / safe_r + b1
        gy = b0 * y / safe_r + b2
        gz = b0 * z / safe_r + b3
        gnorm = np.sqrt(gx * gx + gy * gy + gz * gz)
        dist = np.abs(fval) / np.maximum(gnorm, 1e-300)
        tol = max(0.5 * self.thickness, 0.5 * grid.h)
        return (r >= self.r_lo) & (r <= self.r_hi) & (dist <= tol)


@dataclass(frozen=True)
class VoxelMask(CompactumSpec):
    """Explicit node mask (must match the target grid dims)."""

    mask: np.ndarray

    def raw_mask(self, grid: VoxelGrid) -> np.ndarray:
        if tuple(self.mask.shape) != tuple(grid.dims):
            raise ValueError("mask dims do not match grid")
        return self.mask.astype(bool)


_STRUCT6 = ndimage.generate_binary_structure(3, 1)


def rasterize(spec: CompactumSpec, grid: VoxelGrid) -> np.ndarray:
    """Node mask of the compactum: raw membership plus a one-cell dilation."""
    raw = spec.raw_mask(grid)
    if not raw.any():
        raise ValueError("compactum rasterises to an empty mask at this resolution")
    return ndimage.binary_dilation(raw, structure=_STRUCT6)


# --------------------------------------------------------------------------
# Kelvin transform


def kelvin_transform(
    f: ScalarField, out_grid: AnnulusGrid | None = None
) -> ScalarField:
    """U(y) = |y| u(y/|y|^2) for an annulus field.

    With the default output grid (the mirrored annulus 1/r_outer..1/r_inner at
    the same resolution) the map t -> -t lands exactly on grid nodes and the
    resampling is exact; a user-supplied grid goes through trilinear
    interpolation in (t, theta, phi).  The inversion centre is the origin.
    """
    if not isinstance(f.grid, AnnulusGrid):
        raise TypeError("kelvin_transform expects an annulus field")
    gin = f.grid
    if out_grid is None:
        gout = AnnulusGrid(
            1.0 / gin.r_outer, 1.0 / gin.r_inner, gin.n_t, gin.n_theta, gin.n_phi
        )
        vals = f.values[::-1, :, :] * np.exp(-gout.t)[:, None, None]
        return ScalarField(gout, vals.copy())
    from scipy.interpolate import RegularGridInterpolator

    phi_ext = np.concatenate([gin.phi, [2.0 * np.pi]])
    vals_ext = np.concatenate([f.values, f.values[:, :, :1]], axis=2)
    interp = RegularGridInterpolator(
        (gin.t, gin.theta, phi_ext),
        vals_ext,
        method="linear",
        bounds_error=False,
        fill_value=0.0,
    )
    tt, th, ph = np.meshgrid(
        out_grid.t, out_grid.theta, out_grid.phi, indexing="ij"
    )
    pts = np.stack([-tt.ravel(), th.ravel(), ph.ravel()], axis=-1)
    vals = interp(pts).reshape(out_grid.shape) * np.exp(-out_grid.t)[:, None, None]
    return ScalarField(out_grid, vals)


# --------------------------------------------------------------------------
# binary field i/o: dims (3 x int64), spacing (float64), origin (3 x float64),
# then float64 node values with x fastest — all little-endian.


def dump_field(f: ScalarField, path: str) -> None:
    if not isinstance(f.grid, VoxelGrid):
        raise TypeError("dump_field writes voxel fields")
    with open(path, "wb") as fh:
        fh.write(np.asarray(f.grid.dims, dtype="<i8").tobytes())
        fh.write(np.asarray([f.grid.h], dtype="<f8").tobytes())
        fh.write(np.asarray(f.grid.origin, dtype="<f8").tobytes())
        fh.write(np.asarray(f.values, dtype="<f8").ravel(order="F").tobytes())


def load_field(path: str) -> ScalarField:
    with open(path, "rb") as fh:
        dims = np.frombuffer(fh.read(24), dtype="<i8")
        h = float(np.frombuffer(fh.read(8), dtype="<f8")[0])
        origin = tuple(np.frombuffer(fh.read(24), dtype="<f8"))
        n = int(dims[0] * dims[1] * dims[2])
        vals = np.frombuffer(fh.read(8 * n), dtype="<f8")
    grid = VoxelGrid(origin, h, tuple(int(d) for d in dims))
    return ScalarField(grid, vals.reshape(tuple(dims), order="F").copy())
