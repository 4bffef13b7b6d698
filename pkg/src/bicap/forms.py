"""Quadratic and bilinear energy forms on annular fields.

Conventions.  A field u(x) restricted to an annulus is sampled in log
coordinates (t, omega) with t = log(1/|x|).  Its *log companion* is
v = e^t u; every bilinear form below takes log companions.  A weight
profile is a scalar function of t together with its derivatives; the
default profile is the kernel g shifted to a marked slice t = tau, in
which case the fourth-order combination G'''' + 2G''' - G'' - 2G' is a
unit point mass at tau and the v*w group of the big form collapses to a
half sphere inner product on that slice.

The big form decomposes into named groups (second radial, mixed, sphere
Laplacian, first-order angular, first-order radial, point-mass/zeroth);
the groups are kept separate because the inequalities the code checks
manipulate them separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernel
from .backend import lap3d
from .sphgrid import AnnulusGrid, ScalarField, VoxelGrid

__all__ = [
    "WeightProfile",
    "FormValue",
    "log_companion",
    "l2_norm_sq",
    "delta_energy",
    "psi_form",
    "b_form",
    "b_tilde_form",
    "q_form",
    "sphere_trace",
    "main_identity_check",
]


# --------------------------------------------------------------------------
# weight profiles


@dataclass(frozen=True)
class WeightProfile:
    """Samples of a t-weight and its derivatives on a grid's log axis.

    `has_delta` marks the default kernel profile, whose fourth-order
    combination is a unit point mass at tau rather than a function.
    """

    tau: float
    t: np.ndarray
    G: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    G3: np.ndarray | None = None
    G4: np.ndarray | None = None
    has_delta: bool = False

    def __post_init__(self):
        for arr in (self.G, self.G1, self.G2):
            if arr.shape != self.t.shape:
                raise ValueError("weight samples must match the t axis")
            if not np.all(np.isfinite(arr)):
                raise ValueError("weight samples must be finite")
        if not self.has_delta and (self.G3 is None or self.G4 is None):
            raise ValueError("smooth profiles need third and fourth derivatives")

    @classmethod
    def kernel_profile(cls, grid: AnnulusGrid, tau: float) -> "WeightProfile":
        """The fundamental-solution weight g(t - tau)."""
        s = grid.t - tau
        return cls(
            tau=float(tau),
            t=grid.t.copy(),
            G=kernel.g(s),
            G1=kernel.g_deriv(s, 1),
            G2=kernel.g_deriv(s, 2),
            has_delta=True,
        )

    @classmethod
    def from_callables(
        cls,
        grid: AnnulusGrid,
        tau: float,
        f: Callable,
        d1: Callable,
        d2: Callable,
        d3: Callable,
        d4: Callable,
    ) -> "WeightProfile":
        """Sample an arbitrary smooth weight and its first four derivatives."""
        t = grid.t.copy()
        return cls(
            tau=float(tau),
            t=t,
            G=np.asarray(f(t), dtype=float),
            G1=np.asarray(d1(t), dtype=float),
            G2=np.asarray(d2(t), dtype=float),
            G3=np.asarray(d3(t), dtype=float),
            G4=np.asarray(d4(t), dtype=float),
            has_delta=False,
        )

    # combinations the forms consume ------------------------------------

    @property
    def angular_weight(self) -> np.ndarray:
        """G'' + G' + 2G, the first-order angular group weight (negated in the form)."""
        return self.G2 + self.G1 + 2.0 * self.G

    @property
    def radial_weight(self) -> np.ndarray:
        """2G'' + 3G' - G, the first-order radial group weight (negated in the form)."""
        return 2.0 * self.G2 + 3.0 * self.G1 - self.G

    @property
    def zeroth_weight(self) -> np.ndarray:
        """G'''' + 2G''' - G'' - 2G' for smooth profiles."""
        if self.has_delta:
            raise ValueError("kernel profile: the zeroth-order weight is a point mass")
        return self.G4 + 2.0 * self.G3 - self.G2 - 2.0 * self.G1


# --------------------------------------------------------------------------
# form values


@dataclass(frozen=True)
class FormValue:
    """A form evaluation with its per-group breakdown."""

    value: float
    breakdown: dict[str, float]

    def __post_init__(self):
        total = sum(self.breakdown.values())
        if abs(total - self.value) > 1e-12 * max(1.0, abs(self.value)):
            raise ValueError("breakdown does not sum to the value")

    def group(self, name: str) -> float:
        return self.breakdown[name]


# --------------------------------------------------------------------------
# helpers


def log_companion(u: ScalarField) -> ScalarField:
    """v = e^t u for a field on an annulus grid."""
    grid = u.grid
    if not isinstance(grid, AnnulusGrid):
        raise TypeError("log companion requires an annulus field")
    return ScalarField(grid, np.exp(grid.t)[:, None, None] * u.values)


def l2_norm_sq(u: ScalarField, region: np.ndarray | None = None) -> float:
    """Volume integral of u^2 (optionally over a boolean region mask)."""
    if isinstance(u.grid, VoxelGrid):
        vals = u.values**2
        if region is not None:
            vals = np.where(region, vals, 0.0)
        return float(vals.sum() * u.grid.h**3)
    w = u.grid.volume_weights()
    vals = u.values**2
    if region is not None:
        vals = np.where(region, vals, 0.0)
    return float(np.einsum("rtp,rtk->", vals, w))


def _require_same_grid(v: ScalarField, w: ScalarField) -> AnnulusGrid:
    if v.grid is not w.grid:
        ga, gb = v.grid, w.grid
        same = (
            isinstance(ga, AnnulusGrid)
            and isinstance(gb, AnnulusGrid)
            and (ga.r_inner, ga.r_outer, ga.n_t, ga.n_theta, ga.n_phi)
            == (gb.r_inner, gb.r_outer, gb.n_t, gb.n_theta, gb.n_phi)
        )
        if not same:
            raise ValueError("fields live on different grids")
    if not isinstance(v.grid, AnnulusGrid):
        raise TypeError("this form is defined for annulus fields")
    return v.grid


def _slice_at(grid: AnnulusGrid, values: np.ndarray, tau: float) -> np.ndarray:
    """Linear-in-t interpolation of a log field to the slice t = tau."""
    t = grid.t
    if not (t[0] <= tau <= t[-1]):
        raise ValueError(f"slice t={tau} outside the grid range [{t[0]}, {t[-1]}]")
    k = int(np.searchsorted(t, tau))
    if k == 0:
        return values[0].copy()
    lam = (tau - t[k - 1]) / (t[k] - t[k - 1])
    return (1.0 - lam) * values[k - 1] + lam * values[k]


def sphere_trace(v: ScalarField, tau: float) -> float:
    """Integral of v(tau, .)^2 over the sphere, interpolating to the slice."""
    grid = v.grid
    if not isinstance(grid, AnnulusGrid):
        raise TypeError("sphere trace requires an annulus field")
    sl = _slice_at(grid, v.values, tau)
    return grid.sphere_integral(sl * sl)


@dataclass
class _Derivs:
    """Cached stencil outputs for one log field."""

    vt: np.ndarray
    vtt: np.ndarray
    lb: np.ndarray
    gth: np.ndarray       # d_theta v
    gph: np.ndarray       # d_phi v / sin(theta)
    gth_t: np.ndarray     # d_theta of v_t
    gph_t: np.ndarray     # d_phi of v_t / sin(theta)


def _derivs(grid: AnnulusGrid, v: np.ndarray) -> _Derivs:
    inv_sin = 1.0 / grid.sin_theta[None, :, None]
    vt = grid.d_dt(v, 1)
    return _Derivs(
        vt=vt,
        vtt=grid.d_dt(v, 2),
        lb=grid.lb_apply(v),
        gth=grid.d_dtheta(v),
        gph=grid.d_dphi(v) * inv_sin,
        gth_t=grid.d_dtheta(vt),
        gph_t=grid.d_dphi(vt) * inv_sin,
    )


def _integrate(grid: AnnulusGrid, integrand: np.ndarray, tw: np.ndarray | None = None) -> float:
    if tw is None:
        tw = grid.tomega_weights()
    return float(np.einsum("rtp,rtk->", integrand, tw))


# --------------------------------------------------------------------------
# the forms


def delta_energy(u: ScalarField, region: np.ndarray | None = None) -> float:
    """Quadrature of (discrete Laplacian of u)^2.

    With region=None the field is treated as compactly supported (two-layer
    zero extension): on a voxel grid it is zero-padded so the halo's
    Laplacian is included; on an annulus the whole grid is integrated.
    With a region mask only in-grid stencil values inside the mask count.
    """
    if isinstance(u.grid, VoxelGrid):
        h = u.grid.h
        if region is None:
            padded = np.pad(u.values, 2)
            lap = np.zeros_like(padded)
            lap3d(padded, 1.0 / h**2, lap)
            return float((lap**2).sum() * h**3)
        lap = np.zeros_like(u.values)
        lap3d(u.values, 1.0 / h**2, lap)
        return float((lap[region] ** 2).sum() * h**3)
    grid = u.grid
    lap = grid.laplacian(u.values)
    vals = lap**2
    if region is not None:
        vals = np.where(region, vals, 0.0)
    return float(np.einsum("rtp,rtk->", vals, grid.volume_weights()))


def psi_form(u: ScalarField) -> FormValue:
    """The annular energy form of the plain field u (not its log companion).

    In log coordinates the integrand, against dt domega, is
    e^t [ (v_tt + v_t)^2 + 2 v_t^2 + 2 |grad_omega v_t|^2
          + (LB v)^2 + 2 v LB v ].
    For two-layer-zero fields it agrees with the squared-Laplacian energy.
    """
    grid = u.grid
    if not isinstance(grid, AnnulusGrid):
        raise TypeError("the annular form requires an annulus field")
    v = u.values
    d = _derivs(grid, v)
    et = np.exp(grid.t)[:, None, None]
    tw = grid.tomega_weights()
    groups = {
        "radial2": _integrate(grid, et * (d.vtt + d.vt) ** 2, tw),
        "radial1": _integrate(grid, 2.0 * et * d.vt**2, tw),
        "mixed": _integrate(grid, 2.0 * et * (d.gth_t**2 + d.gph_t**2), tw),
        "lb": _integrate(grid, et * d.lb**2, tw),
        "cross": _integrate(grid, 2.0 * et * v * d.lb, tw),
    }
    return FormValue(sum(groups.values()), groups)


def _b_groups(
    grid: AnnulusGrid,
    dv: _Derivs,
    dw: _Derivs,
    weights: WeightProfile,
) -> dict[str, float]:
    """The five function-weighted groups shared by the big and reduced forms."""
    tw = grid.tomega_weights()
    G = weights.G[:, None, None]
    wa = weights.angular_weight[:, None, None]
    wr = weights.radial_weight[:, None, None]
    return {
        "lb": _integrate(grid, dv.lb * dw.lb * G, tw),
        "mixed": _integrate(
            grid, 2.0 * (dv.gth_t * dw.gth_t + dv.gph_t * dw.gph_t) * G, tw
        ),
        "radial2": _integrate(grid, dv.vtt * dw.vtt * G, tw),
        "angular1": _integrate(grid, -(dv.gth * dw.gth + dv.gph * dw.gph) * wa, tw),
        "radial1": _integrate(grid, -dv.vt * dw.vt * wr, tw),
    }


def b_form(v: ScalarField, w: ScalarField, weights: WeightProfile) -> FormValue:
    """The six-group bilinear form of log companions against a weight profile."""
    grid = _require_same_grid(v, w)
    groups = _b_groups(grid, _derivs(grid, v.values), _derivs(grid, w.values), weights)
    if weights.has_delta:
        sv = _slice_at(grid, v.values, weights.tau)
        sw = _slice_at(grid, w.values, weights.tau)
        groups["zeroth"] = 0.5 * grid.sphere_integral(sv * sw)
    else:
        wz = weights.zeroth_weight[:, None, None]
        groups["zeroth"] = _integrate(grid, 0.5 * v.values * w.values * wz)
    return FormValue(sum(groups.values()), groups)


def b_tilde_form(v: ScalarField, w: ScalarField, weights: WeightProfile) -> FormValue:
    """The five-group reduced form: the big form without its zeroth group."""
    grid = _require_same_grid(v, w)
    groups = _b_groups(grid, _derivs(grid, v.values), _derivs(grid, w.values), weights)
    return FormValue(sum(groups.values()), groups)


def q_form(u: ScalarField, region, tau: float) -> FormValue:
    """The reduced form of the log companion of u over a radial sub-range.

    `region` selects the t-range: either a boolean mask over the t axis
    (must be contiguous) or a pair (r_lo, r_hi) of radii.
    """
    grid = u.grid
    if not isinstance(grid, AnnulusGrid):
        raise TypeError("the restricted form requires an annulus field")
    if isinstance(region, tuple) and len(region) == 2:
        r_lo, r_hi = region
        mask = (grid.r >= r_lo - 1e-12) & (grid.r <= r_hi + 1e-12)
    else:
        mask = np.asarray(region, dtype=bool)
        if mask.shape != grid.t.shape:
            raise ValueError("t-axis mask has the wrong length")
    idx = np.flatnonzero(mask)
    if idx.size < 2:
        raise ValueError("region must contain at least two radial nodes")
    if not np.all(np.diff(idx) == 1):
        raise ValueError("region must be a contiguous radial range")

    weights = WeightProfile.kernel_profile(grid, tau)
    v = log_companion(u)
    d = _derivs(grid, v.values)

    # trapezoid weights supported on the sub-range only
    wt = np.zeros_like(grid.t)
    wt[idx[0] : idx[-1] + 1] = grid.dt
    wt[idx[0]] *= 0.5
    wt[idx[-1]] *= 0.5
    tw = wt[:, None, None] * grid.sphere_w[None, :, None]

    G = weights.G[:, None, None]
    wa = weights.angular_weight[:, None, None]
    wr = weights.radial_weight[:, None, None]
    groups = {
        "lb": _integrate(grid, d.lb * d.lb * G, tw),
        "mixed": _integrate(grid, 2.0 * (d.gth_t**2 + d.gph_t**2) * G, tw),
        "radial2": _integrate(grid, d.vtt**2 * G, tw),
        "angular1": _integrate(grid, -(d.gth**2 + d.gph**2) * wa, tw),
        "radial1": _integrate(grid, -d.vt**2 * wr, tw),
    }
    return FormValue(sum(groups.values()), groups)


def main_identity_check(u: ScalarField, weights: WeightProfile) -> tuple[float, float]:
    """Both sides of the pairing identity for a compactly supported field.

    Left: the volume quadrature of  Delta u * Delta(u e^t G)  over the
    annulus.  Right: the six-group form of the log companion.  The field
    must vanish on the two outermost slices at each radial end.
    """
    grid = u.grid
    if not isinstance(grid, AnnulusGrid):
        raise TypeError("the identity requires an annulus field")
    scale = float(np.max(np.abs(u.values))) or 1.0
    ends = np.concatenate([u.values[:2].ravel(), u.values[-2:].ravel()])
    if np.max(np.abs(ends)) > 1e-12 * scale:
        raise ValueError("field is not compactly supported inside the grid")

    mult = (np.exp(grid.t) * weights.G)[:, None, None]
    lap_u = grid.laplacian(u.values)
    lap_w = grid.laplacian(u.values * mult)
    lhs = float(np.einsum("rtp,rtk->", lap_u * lap_w, grid.volume_weights()))

    v = log_companion(u)
    rhs = b_form(v, v, weights).value
    return lhs, rhs
