"""Desk-scale clamped biharmonic experiments on voxel domains.

Four experiment families sit on top of the shared plate solver:

* Dirichlet solves with a volume load, checked by the discrete variational
  identity  integral (lap u)^2 = integral f u;
* Green-function sampling by a discrete point load, with symmetry and
  mixed-derivative bounds: the quantity sup |x-y| |grad_x grad_y G| is the
  discrete face of the gradient estimate, and it localizes (the smooth
  boundary correction contributes O(|x-y|/box) to the Hessian even though
  it dominates the *values* of G on any bounded box);
* the punctured-ball field eta(|x|) |x| whose gradient is bounded but has
  no limit at the puncture;
* an exponential-decay experiment correlating the interior gradient sup
  against the per-layer capacity sums of obstacle shells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage

from ._plate import PlateSystem, SolveStats
from .capacity import BoxDomain
from .fields import smooth_step, voxel_bump_field
from .sphgrid import CuspLayer, ScalarField, VoxelGrid, gradient, rasterize
from .wiener import LayerFamily, LayerSeries, decay_factor, layer_capacities

__all__ = [
    "DirichletProblem",
    "DirichletSolution",
    "solve_dirichlet",
    "GreenSample",
    "green_sample",
    "MixedGradientReport",
    "mixed_gradient_sup",
    "default_pairs",
    "free_space_mixed_oracle",
    "PuncturedBallReport",
    "punctured_ball_demo",
    "DecayReport",
    "DecayConfigResult",
    "decay_experiment",
    "RieszReport",
    "riesz_estimate_check",
]

Index = tuple[int, int, int]


# --------------------------------------------------------------------------
# Dirichlet problem


@dataclass(frozen=True)
class DirichletProblem:
    """Clamped fourth-order problem  lap^2 u = f  on a masked voxel domain."""

    grid: VoxelGrid
    domain_mask: np.ndarray
    rhs: np.ndarray | None = None
    tol: float = 1e-8

    def __post_init__(self):
        if self.domain_mask.shape != tuple(self.grid.dims):
            raise ValueError("domain mask does not match the grid")
        if not self.domain_mask.any():
            raise ValueError("empty domain")
        _, n_comp = ndimage.label(self.domain_mask)
        if n_comp != 1:
            raise ValueError(f"domain mask must be connected (found {n_comp} components)")
        if self.rhs is not None:
            if self.rhs.shape != tuple(self.grid.dims):
                raise ValueError("rhs does not match the grid")
            if np.any(self.rhs[~self.domain_mask] != 0.0):
                raise ValueError("rhs must be supported inside the domain mask")


@dataclass(frozen=True)
class DirichletSolution:
    field: ScalarField
    stats: SolveStats
    energy: float
    load_product: float

    @property
    def variational_defect(self) -> float:
        """Relative gap between the energy and the load pairing."""
        scale = max(abs(self.energy), abs(self.load_product), 1e-300)
        return abs(self.energy - self.load_product) / scale


def solve_dirichlet(problem: DirichletProblem) -> DirichletSolution:
    """Minimise the clamped energy with the volume load; u = 0 off the domain.

    At the minimiser the discrete identity  h^3 sum (lap u)^2 = h^3 sum f u
    holds to solver tolerance, which `variational_defect` reports.
    """
    system = PlateSystem(problem.grid, problem.domain_mask, order=2)
    no_fix = np.zeros(problem.grid.dims, dtype=bool)
    u, stats = system.solve(no_fix, 0.0, rhs_field=problem.rhs, tol=problem.tol)
    h3 = problem.grid.h**3
    energy = system.energy(u)
    load = 0.0 if problem.rhs is None else float(np.sum(problem.rhs * u) * h3)
    return DirichletSolution(
        field=ScalarField(problem.grid, u), stats=stats, energy=energy, load_product=load
    )


# --------------------------------------------------------------------------
# Green sampling


@dataclass(frozen=True)
class GreenSample:
    """Response to the discrete unit point mass h^{-3} at `source`."""

    source: Index
    field: ScalarField
    stats: SolveStats

    def __post_init__(self):
        if not np.all(np.isfinite(self.field.values)):
            raise ValueError("Green sample is not finite")

    def value(self, x: Index) -> float:
        return float(self.field.values[tuple(x)])


def _require_interior(grid: VoxelGrid, domain_mask: np.ndarray, idx: Index, what: str) -> None:
    i, j, k = idx
    nx, ny, nz = grid.dims
    if not (0 < i < nx - 1 and 0 < j < ny - 1 and 0 < k < nz - 1):
        raise ValueError(f"{what} node {idx} lies on the grid boundary")
    patch = domain_mask[i - 1 : i + 2, j - 1 : j + 2, k - 1 : k + 2]
    if not (domain_mask[idx] and patch[1, 1, 1] and patch.all()):
        raise ValueError(f"{what} node {idx} is not interior to the domain")


def green_sample(
    grid: VoxelGrid, domain_mask: np.ndarray, source: Index, tol: float = 1e-8
) -> GreenSample:
    """One column of the discrete Green function: lap^2 G = delta_source."""
    source = tuple(int(i) for i in source)
    _require_interior(grid, domain_mask, source, "source")
    rhs = np.zeros(grid.dims)
    rhs[source] = 1.0 / grid.h**3
    system = PlateSystem(grid, domain_mask, order=2)
    no_fix = np.zeros(grid.dims, dtype=bool)
    u, stats = system.solve(no_fix, 0.0, rhs_field=rhs, tol=tol)
    return GreenSample(source=source, field=ScalarField(grid, u), stats=stats)


# --------------------------------------------------------------------------
# gradient bounds


def free_space_mixed_oracle() -> float:
    """sup |x-y| * |grad_x grad_y (|x-y|/8pi)| in the Frobenius norm.

    The mixed Hessian of the radial fundamental solution is
    -(I - rr^T/|r|^2) / (8 pi |r|): a rank-two projector over 8 pi |r|,
    whose Frobenius norm times |r| is sqrt(2)/(8 pi) at every separation.
    """
    return math.sqrt(2.0) / (8.0 * math.pi)


def _central_grad(values: np.ndarray, idx: Index, h: float) -> np.ndarray:
    i, j, k = idx
    return np.array(
        [
            values[i + 1, j, k] - values[i - 1, j, k],
            values[i, j + 1, k] - values[i, j - 1, k],
            values[i, j, k + 1] - values[i, j, k - 1],
        ]
    ) / (2.0 * h)


@dataclass(frozen=True)
class MixedGradientReport:
    """Per-pair discrete bounds |x-y| |grad_x grad_y G| and |grad_x G|."""

    mixed_sup: float
    grad_sup: float
    pair_values: tuple[tuple[float, float, float], ...]  # (|x-y|, mixed, grad)
    n_solves: int


def mixed_gradient_sup(
    grid: VoxelGrid,
    domain_mask: np.ndarray,
    pairs: Sequence[tuple[Index, Index]],
    tol: float = 1e-8,
) -> MixedGradientReport:
    """Estimate sup |x-y| |grad_x grad_y G| over the given (x, y) node pairs.

    The y-derivative is a central difference of Green columns sourced at the
    six neighbours of y (plus the centre column for |grad_x G|); the
    x-derivative is a central difference at x.  Pairs closer than four cells
    are rejected: below stencil scale the discrete kernel cannot resolve
    the 1/|x-y| profile.
    """
    if len(pairs) < 16:
        raise ValueError("need at least 16 sample pairs")
    h = grid.h
    for x_idx, y_idx in pairs:
        dist = np.linalg.norm(np.asarray(x_idx, float) - np.asarray(y_idx, float))
        if dist < 4.0:
            raise ValueError(f"pair {x_idx}/{y_idx} is closer than four cells")
        _require_interior(grid, domain_mask, tuple(x_idx), "target")
        _require_interior(grid, domain_mask, tuple(y_idx), "source")

    offsets = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    cache: dict[Index, list[np.ndarray]] = {}
    n_solves = 0
    system = PlateSystem(grid, domain_mask, order=2)
    no_fix = np.zeros(grid.dims, dtype=bool)

    def columns(y_idx: Index) -> list[np.ndarray]:
        nonlocal n_solves
        if y_idx not in cache:
            cols = []
            for off in [(0, 0, 0)] + offsets:
                src = (y_idx[0] + off[0], y_idx[1] + off[1], y_idx[2] + off[2])
                _require_interior(grid, domain_mask, src, "shifted source")
                rhs = np.zeros(grid.dims)
                rhs[src] = 1.0 / h**3
                u, _ = system.solve(no_fix, 0.0, rhs_field=rhs, tol=tol)
                cols.append(u)
                n_solves += 1
            cache[y_idx] = cols
        return cache[y_idx]

    values = []
    for x_idx, y_idx in pairs:
        x_idx, y_idx = tuple(x_idx), tuple(y_idx)
        cols = columns(y_idx)
        dist = float(np.linalg.norm(grid.node(x_idx) - grid.node(y_idx)))
        hess = np.empty((3, 3))
        for cy in range(3):
            gp = _central_grad(cols[1 + 2 * cy], x_idx, h)
            gm = _central_grad(cols[2 + 2 * cy], x_idx, h)
            hess[:, cy] = (gp - gm) / (2.0 * h)
        grad = float(np.linalg.norm(_central_grad(cols[0], x_idx, h)))
        values.append((dist, dist * float(np.linalg.norm(hess)), grad))

    mixed_sup = max(v[1] for v in values)
    grad_sup = max(v[2] for v in values)
    return MixedGradientReport(
        mixed_sup=mixed_sup,
        grad_sup=grad_sup,
        pair_values=tuple(values),
        n_solves=n_solves,
    )


def default_pairs(
    grid: VoxelGrid,
    domain_mask: np.ndarray,
    n_sources: int = 2,
    n_targets: int = 8,
    seed: int = 0,
    min_cells: float = 4.0,
) -> list[tuple[Index, Index]]:
    """Deterministic interior (x, y) pairs at least `min_cells` apart.

    Targets keep a full 3x3x3 in-domain patch (for central differences);
    sources keep a 5x5x5 patch so their six shifted sources stay interior.
    """
    rng = np.random.default_rng(seed)
    inner = np.zeros(grid.dims, dtype=bool)
    inner[2:-2, 2:-2, 2:-2] = True
    box27 = ndimage.generate_binary_structure(3, 3)
    target_ok = inner & ndimage.binary_erosion(domain_mask, box27)
    source_ok = inner & ndimage.binary_erosion(domain_mask, box27, iterations=2)
    cand_x = np.argwhere(target_ok)
    cand_y = np.argwhere(source_ok)
    if cand_y.shape[0] < n_sources or cand_x.shape[0] < n_sources + n_targets:
        raise ValueError("domain too small for the requested pair sample")
    pairs: list[tuple[Index, Index]] = []
    sources = cand_y[rng.permutation(cand_y.shape[0])[:n_sources]]
    order_x = rng.permutation(cand_x.shape[0])
    for y in sources:
        picked = 0
        for i in order_x:
            x = cand_x[i]
            if picked == n_targets:
                break
            if np.linalg.norm(x - y) >= min_cells:
                pairs.append((tuple(int(v) for v in x), tuple(int(v) for v in y)))
                picked += 1
        if picked < n_targets:
            raise ValueError("could not place enough targets away from a source")
    return pairs


# --------------------------------------------------------------------------
# the punctured-ball field


@dataclass(frozen=True)
class PuncturedBallReport:
    """Discrete audit of the bounded-but-discontinuous-gradient example."""

    n: int
    h: float
    energy: float
    sup_grad_core: float
    grad_x_axis: np.ndarray
    grad_z_axis: np.ndarray
    gradient_angle: float
    rhs_inner_sup: float
    rhs_shell_sup: float
    boundary_max: float


def _radial_bilaplacian_profile(
    lo: float, hi: float, r_max: float, samples: int = 20001
) -> tuple[np.ndarray, np.ndarray]:
    """Fine-grid radial  lap^2 (eta(r) r)  for eta = smooth_step(r, lo, hi)."""
    r = np.linspace(1e-6, r_max, samples)
    w = smooth_step(r, lo, hi) * r
    d1 = np.gradient(w, r, edge_order=2)
    lap = np.gradient(d1, r, edge_order=2) + 2.0 * d1 / r
    l1 = np.gradient(lap, r, edge_order=2)
    lap2 = np.gradient(l1, r, edge_order=2) + 2.0 * l1 / r
    return r, lap2


def punctured_ball_demo(n: int, cut_lo: float = 0.25, cut_hi: float = 0.5) -> PuncturedBallReport:
    """Audit u = eta(|x|) |x| on the unit ball with the origin node removed.

    The field vanishes at the puncture and outside B_{cut_hi}, carries finite
    clamped energy, and its volume load lap^2 u is exactly zero wherever eta
    is constant (lap^2 |x| = lap (2/|x|) = 0 away from the origin), i.e. the
    load lives on the transition shell only.  The discrete gradient stays
    within a few percent of unit length near the puncture while its
    direction follows x/|x|.

    Even n is bumped to n+1 so the puncture and the near-origin axis probes
    land exactly on grid nodes; the report carries the size actually used.
    """
    if n < 32:
        raise ValueError("need n >= 32 to resolve the transition shell")
    if n % 2 == 0:
        n += 1
    grid = VoxelGrid.cube(1.0, n)
    r = grid.radius()
    domain = (r < 1.0).copy()
    domain[grid.nearest_index((0.0, 0.0, 0.0))] = False

    u = smooth_step(r, cut_lo, cut_hi) * r
    fld = ScalarField(grid, u)
    system = PlateSystem(grid, domain, order=2)
    energy = system.energy(u)

    # analytic load: zero off the transition shell, radial profile on it
    rf, lap2 = _radial_bilaplacian_profile(cut_lo, cut_hi, 0.9)
    rhs = np.where((r > cut_lo) & (r < cut_hi), np.interp(r, rf, lap2), 0.0)
    core = (r > 0.0) & (r < 0.125)

    g = gradient(fld)
    gnorm = np.sqrt(np.sum(g * g, axis=0))
    core_quarter = (r > 0.0) & (r <= cut_lo)
    sup_core = float(gnorm[core_quarter].max())

    ix = grid.nearest_index((grid.h, 0.0, 0.0))
    iz = grid.nearest_index((0.0, 0.0, grid.h))
    gx = g[:, ix[0], ix[1], ix[2]].copy()
    gz = g[:, iz[0], iz[1], iz[2]].copy()
    cosang = float(np.dot(gx, gz) / (np.linalg.norm(gx) * np.linalg.norm(gz)))
    angle = math.acos(max(-1.0, min(1.0, cosang)))

    return PuncturedBallReport(
        n=n,
        h=grid.h,
        energy=energy,
        sup_grad_core=sup_core,
        grad_x_axis=gx,
        grad_z_axis=gz,
        gradient_angle=angle,
        rhs_inner_sup=float(np.abs(rhs[core]).max()),
        rhs_shell_sup=float(np.abs(rhs).max()),
        boundary_max=float(np.abs(u[r >= cut_hi]).max()),
    )


# --------------------------------------------------------------------------
# capacity-driven decay


class _HalfShellLayers(LayerFamily):
    """Unit-scale northern half-shells, populated on a chosen layer set."""

    def __init__(self, populated: frozenset[int]):
        self.populated = populated

    def layer(self, j: int, a: float, ratio: float) -> CuspLayer | None:
        if j not in self.populated:
            return None
        return CuspLayer(profile=lambda rho: np.full_like(rho, math.pi / 2), r_lo=1.0, r_hi=ratio)

    def key(self, j: int, ratio: float) -> str:
        return f"halfshell:{j in self.populated}:r{ratio:.12g}"


@dataclass(frozen=True)
class DecayConfigResult:
    name: str
    sup_values: np.ndarray
    s_values: np.ndarray
    slope_vs_s: float | None
    r2_vs_s: float | None
    slope_vs_l: float
    no_layers: bool
    stats: SolveStats


@dataclass(frozen=True)
class DecayReport:
    n: int
    R: float
    a: float
    l_values: np.ndarray
    configs: tuple[DecayConfigResult, ...]

    def config(self, name: str) -> DecayConfigResult:
        for c in self.configs:
            if c.name == name:
                return c
        raise KeyError(name)


def _fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and R^2 of y against x."""
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(coef[1]), r2


def decay_experiment(
    n: int = 96,
    R: float = 0.36,
    a: float = 2.0,
    l_values: Sequence[int] = (2, 3, 4),
    obstacle_layers: Sequence[int] = (1, 2, 3, 4),
    configs: Sequence[str] = ("none", "every", "alternate"),
    source_center: Sequence[float] = (0.88, 0.88, 0.88),
    source_radius: float = 0.06,
    tol: float = 1e-7,
    unit_n: int = 33,
) -> DecayReport:
    """Correlate interior gradient sups against obstacle-layer capacity sums.

    Obstacle layer j is the northern half-shell R a^{-j} <= |x| <= R a^{-j+1}
    (a geometry whose free complement stays grid-connected at every scale);
    the source is a corner bump outside B_{4R}.  For each configuration the
    report carries sup(|grad u| + |u|/|x|) over the balls |x| <= R a^{-l},
    the capacity sums S(l), and the regression of log sup against S(l).
    The empty configuration has S = 0 and reports its flatness slope in l.

    The origin node is carved out exactly when the complement is nonempty
    (obstacles make the origin a boundary point); the empty baseline keeps
    the box intact, so its marked point is interior and no decay occurs.
    """
    if not all(l >= 2 for l in l_values) or len(l_values) < 2:
        raise ValueError("need sup radii at l >= 2")
    grid = VoxelGrid.cube(1.0, n)
    r = grid.radius()

    src = voxel_bump_field(grid, center=tuple(source_center), radius=source_radius)
    support_r = r[src.values != 0.0]
    if support_r.size == 0 or support_r.min() < 4.0 * R:
        raise ValueError("source must be supported outside four times the layer scale")

    layer_sets = {
        "none": frozenset(),
        "every": frozenset(obstacle_layers),
        "alternate": frozenset(j for j in obstacle_layers if j % 2 == 0),
    }
    unknown = set(configs) - set(layer_sets)
    if unknown:
        raise ValueError(f"unknown configurations {sorted(unknown)}")

    # one unit-scale Gram serves every populated layer (identical geometry)
    j_max = max(l_values)
    base = layer_capacities(
        _HalfShellLayers(frozenset(obstacle_layers)), a=a, j_max=j_max, n=unit_n, tol=1e-8
    )

    def series_for(populated: frozenset[int]) -> LayerSeries:
        grams = tuple(
            base.grams_hat[j] if j in populated else np.zeros((4, 4))
            for j in range(0, j_max + 1)
        )
        return LayerSeries(
            a=a, j_min=0, j_max=j_max, doubled=False, grams_hat=grams, stats=dict(base.stats)
        )

    results = []
    for name in configs:
        populated = layer_sets[name]
        obstacle = np.zeros(grid.dims, dtype=bool)
        for j in sorted(populated):
            spec = CuspLayer(
                profile=lambda rho: np.full_like(rho, math.pi / 2),
                r_lo=R * a ** (-j),
                r_hi=R * a ** (-j + 1),
            )
            obstacle |= rasterize(spec, grid)
        box = BoxDomain(1.0, exclude_origin=bool(populated)).mask(grid)
        domain = box & ~obstacle
        problem = DirichletProblem(grid, domain, rhs=src.values, tol=tol)
        sol = solve_dirichlet(problem)
        u = sol.field.values
        g = gradient(sol.field)
        gnorm = np.sqrt(np.sum(g * g, axis=0))
        with np.errstate(divide="ignore", invalid="ignore"):
            quotient = np.where(r > 0.0, np.abs(u) / np.maximum(r, 1e-300), 0.0)
        pointwise = gnorm + quotient

        sups, s_vals = [], []
        series = series_for(populated)
        for l in l_values:
            ball = domain & (r > 0.0) & (r <= R * a ** (-float(l)))
            if not ball.any():
                raise ValueError(f"no domain nodes inside the l={l} ball at n={n}")
            sups.append(float(pointwise[ball].max()))
            s_vals.append(decay_factor(series, l))
        sups = np.asarray(sups)
        s_vals = np.asarray(s_vals)
        if np.any(sups <= 0.0):
            raise RuntimeError("gradient sup vanished; obstacles decoupled the grid")

        ls = np.asarray(l_values, dtype=float)
        slope_l, _ = _fit_line(ls, np.log(sups))
        if s_vals.max() > 0.0:
            slope_s, r2_s = _fit_line(s_vals, np.log(sups))
        else:
            slope_s, r2_s = None, None
        results.append(
            DecayConfigResult(
                name=name,
                sup_values=sups,
                s_values=s_vals,
                slope_vs_s=slope_s,
                r2_vs_s=r2_s,
                slope_vs_l=slope_l,
                no_layers=not populated,
                stats=sol.stats,
            )
        )
    return DecayReport(n=n, R=R, a=a, l_values=np.asarray(l_values), configs=tuple(results))


# --------------------------------------------------------------------------
# Riesz-potential estimate


@dataclass(frozen=True)
class RieszReport:
    """Pointwise gradient samples against the potential-theoretic majorant."""

    samples: tuple[tuple[float, float], ...]  # (|grad u|(x), majorant(x))
    ratio_sup: float
    stats: SolveStats


def riesz_estimate_check(
    grid: VoxelGrid,
    f_vec: np.ndarray | None = None,
    h_scal: np.ndarray | None = None,
    sample_nodes: Sequence[Index] = (),
    tol: float = 1e-8,
) -> RieszReport:
    """Solve  lap^2 u = div f + h  on the open box and sample the bound
    |grad u(x)|  vs  integral |f(y)|/|x-y| dy + integral |h(y)| dy.

    The self-cell of the singular integral is dropped (an O(h^2 |f|)
    perturbation).  Zero data reports (0, 0) samples.
    """
    if len(sample_nodes) == 0:
        raise ValueError("need at least one sample node")
    domain = np.zeros(grid.dims, dtype=bool)
    domain[1:-1, 1:-1, 1:-1] = True
    h = grid.h
    rhs = np.zeros(grid.dims)
    if f_vec is not None:
        if f_vec.shape != (3, *grid.dims):
            raise ValueError("vector data must have shape (3, nx, ny, nz)")
        for c in range(3):
            rhs += np.gradient(f_vec[c], h, axis=c, edge_order=2)
    if h_scal is not None:
        if h_scal.shape != tuple(grid.dims):
            raise ValueError("scalar data does not match the grid")
        rhs += h_scal
    if np.any(rhs[~domain] != 0.0):
        raise ValueError("div f + h must be supported inside the open box")

    problem = DirichletProblem(grid, domain, rhs=rhs, tol=tol)
    sol = solve_dirichlet(problem)
    g = gradient(sol.field)

    h3 = h**3
    mass_h = 0.0 if h_scal is None else float(np.sum(np.abs(h_scal)) * h3)
    fmag = None if f_vec is None else np.sqrt(np.sum(f_vec**2, axis=0))
    xs, ys, zs = grid.coords()

    samples = []
    for idx in sample_nodes:
        idx = tuple(int(i) for i in idx)
        _require_interior(grid, domain, idx, "sample")
        lhs = float(np.linalg.norm(g[:, idx[0], idx[1], idx[2]]))
        pot = 0.0
        if fmag is not None:
            p = grid.node(idx)
            dist = np.sqrt((xs - p[0]) ** 2 + (ys - p[1]) ** 2 + (zs - p[2]) ** 2)
            dist[idx] = np.inf  # drop the self cell
            pot = float(np.sum(fmag / dist) * h3)
        samples.append((lhs, pot + mass_h))

    ratios = [lhs / rhs_v for lhs, rhs_v in samples if rhs_v > 0.0]
    ratio_sup = max(ratios) if ratios else 0.0
    return RieszReport(samples=tuple(samples), ratio_sup=ratio_sup, stats=sol.stats)
