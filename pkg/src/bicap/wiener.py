"""Layer decomposition of a domain complement and the two regularity series.

The complement of a domain near the marked origin is sliced into dyadic-type
annular layers K_j inside s_j <= |x| <= a*s_j with s_j = a^{-j}.  Each layer
gets a profile-capacity Gram matrix; the *sufficiency* series sums the
per-layer infima with weights a^{-j}, while the *necessity* series takes one
infimum of the weighted Gram sum (inf outside the sum), over the doubled
layers s_j <= |x| <= a^2 s_j.

Everything is computed at unit scale: by the exact scaling law, the weighted
matrix a^{-j} G_j equals the Gram of the rescaled layer a^j K_j inside the
unit annulus, so a layer family only has to describe its unit-scale
geometry, identical layers are solved once, and no tiny-grid solves happen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .capacity import AnnulusDomain, CapacityProblem, GramMatrix, cap_gram, cap_inf
from .sphgrid import CompactumSpec, CuspLayer, VoxelGrid, VoxelMask

__all__ = [
    "LayerFamily",
    "EmptyLayers",
    "FullLayers",
    "SingleLayer",
    "CuspLayers",
    "LayerSeries",
    "RegularityVerdict",
    "layer_capacities",
    "sufficiency_sum",
    "necessity_sum",
    "verdict",
    "decay_factor",
]


# --------------------------------------------------------------------------
# layer families (unit-scale geometry providers)


class LayerFamily:
    """Describes the unit-scale geometry of each complement layer.

    `layer(j, a, ratio)` returns the compactum a^j K_j, which sits in the
    closed annulus 1 <= |x| <= ratio, or None when the layer is empty.
    `key(j, ratio)` labels the geometry; equal keys are solved once.
    """

    def layer(self, j: int, a: float, ratio: float) -> CompactumSpec | None:  # pragma: no cover
        raise NotImplementedError

    def key(self, j: int, ratio: float) -> str:
        return f"j{j}:r{ratio:.12g}"


class EmptyLayers(LayerFamily):
    def layer(self, j: int, a: float, ratio: float) -> None:
        return None

    def key(self, j: int, ratio: float) -> str:
        return "empty"


class _ShellSpec(CompactumSpec):
    """Closed shell r_lo <= |x| <= r_hi as a rasterizable compactum."""

    def __init__(self, r_lo: float, r_hi: float):
        self.r_lo = float(r_lo)
        self.r_hi = float(r_hi)

    def raw_mask(self, grid: VoxelGrid) -> np.ndarray:
        r = grid.radius()
        return (r >= self.r_lo) & (r <= self.r_hi)


class FullLayers(LayerFamily):
    """Every layer is the full annulus closure."""

    def layer(self, j: int, a: float, ratio: float) -> CompactumSpec:
        return _ShellSpec(1.0, ratio)

    def key(self, j: int, ratio: float) -> str:
        return f"full:r{ratio:.12g}"


@dataclass(frozen=True)
class SingleLayer(LayerFamily):
    """Exactly one populated layer."""

    j0: int
    spec: CompactumSpec

    def layer(self, j: int, a: float, ratio: float) -> CompactumSpec | None:
        return self.spec if j == self.j0 else None

    def key(self, j: int, ratio: float) -> str:
        return f"single:{j == self.j0}:r{ratio:.12g}"


class CuspLayers(LayerFamily):
    """Layers cut from a rotational cusp  theta <= h(|x|)  around +z.

    `h` is the continuum half-angle profile as a function of the true
    radius; layer j sees it rescaled to the unit annulus.
    """

    def __init__(self, h, label: str = "cusp"):
        self.h = h
        self.label = label

    def layer(self, j: int, a: float, ratio: float) -> CompactumSpec:
        s_j = a ** (-j)
        return CuspLayer(
            profile=lambda rho, s=s_j, h=self.h: h(s * rho),
            r_lo=1.0,
            r_hi=ratio,
        )

    def key(self, j: int, ratio: float) -> str:
        return f"{self.label}:{j}:r{ratio:.12g}"


# --------------------------------------------------------------------------
# series


@dataclass(frozen=True)
class LayerSeries:
    """Unit-scale Grams and derived numbers for layers j_min..j_max.

    `grams_hat[i]` is the Gram of the rescaled layer j = j_min + i (zero
    matrix for empty layers); by scaling it equals a^{-j} G_j, so its
    smallest eigenvalue is the j-th sufficiency term and the running
    matrix sums feed the necessity infimum directly.
    """

    a: float
    j_min: int
    j_max: int
    doubled: bool
    grams_hat: tuple[np.ndarray, ...]
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.a >= 2.0):
            raise ValueError("layer ratio a must be >= 2")
        if self.j_max < self.j_min:
            raise ValueError("empty layer range")
        for g in self.grams_hat:
            lo = float(np.linalg.eigvalsh(g)[0])
            if lo < -1e-10 * max(float(np.trace(g)), 1.0):
                raise ValueError("layer Gram not positive semidefinite")

    @property
    def js(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def terms(self) -> np.ndarray:
        """Sufficiency terms a^{-j} gamma_j = lambda_min of the unit Grams."""
        return np.array([float(np.linalg.eigvalsh(g)[0]) for g in self.grams_hat])

    def gamma(self, j: int) -> float:
        """True-scale layer capacity gamma_j = a^j * lambda_min(G_hat_j)."""
        i = j - self.j_min
        return float(self.a**j * np.linalg.eigvalsh(self.grams_hat[i])[0])


def layer_capacities(
    family: LayerFamily,
    a: float = 2.0,
    j_max: int = 8,
    n: int = 33,
    j_min: int = 0,
    doubled: bool = False,
    tol: float = 1e-8,
) -> LayerSeries:
    """Per-layer Gram matrices, solved at unit scale with geometry caching.

    `doubled=True` builds the overlapping layers 1 <= |x| <= a^2 used by the
    necessity series; otherwise 1 <= |x| <= a.
    """
    ratio = a * a if doubled else a
    domain = AnnulusDomain(1.0, ratio)
    cache: dict[str, np.ndarray] = {}
    grams: list[np.ndarray] = []
    solves = 0
    for j in range(j_min, j_max + 1):
        key = family.key(j, ratio)
        if key in cache:
            grams.append(cache[key])
            continue
        spec = family.layer(j, a, ratio)
        if spec is None:
            g = np.zeros((4, 4))
        else:
            g = cap_gram(CapacityProblem(spec, domain, n, tol)).matrix
            solves += 1
        cache[key] = g
        grams.append(g)
    return LayerSeries(
        a=a,
        j_min=j_min,
        j_max=j_max,
        doubled=doubled,
        grams_hat=tuple(grams),
        stats={"gram_solves": solves, "n": n},
    )


def sufficiency_sum(series: LayerSeries) -> np.ndarray:
    """Partial sums S_l = sum_{j<=l} a^{-j} inf_P Cap_P(layer j)."""
    return np.cumsum(series.terms)


def necessity_sum(series: LayerSeries) -> tuple[np.ndarray, np.ndarray]:
    """Partial infima of the weighted Gram sum over a single profile.

    value_l = lambda_min( sum_{j<=l} a^{-j} G_j ); returns the values and
    the minimizing profile coefficients at the last l.
    """
    if not series.doubled:
        raise ValueError("the necessity series is defined on doubled layers")
    running = np.zeros((4, 4))
    values = []
    b = np.array([1.0, 0.0, 0.0, 0.0])
    for g in series.grams_hat:
        running = running + g
        val, b = cap_inf(running)
        values.append(val)
    return np.asarray(values), b


@dataclass(frozen=True)
class RegularityVerdict:
    """Outcome of a regularity test.

    Numeric layer data can only ever produce a trend ('numeric-trend' with
    a fitted tail model); closed-form families (models module) may yield
    'analytic-divergent' / 'analytic-convergent'.
    """

    kind: str
    model: str
    detail: dict

    def __post_init__(self):
        if self.kind not in ("analytic-divergent", "analytic-convergent", "numeric-trend"):
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        if self.model not in ("bounded", "log", "linear"):
            raise ValueError(f"unknown tail model {self.model!r}")

    @property
    def suggests_divergence(self) -> bool:
        return self.model in ("log", "linear")


def verdict(partial_sums: np.ndarray) -> RegularityVerdict:
    """Fit the tail of a partial-sum sequence against bounded/log/linear.

    Least squares on the last half of the sequence; a divergent model is
    only selected when its fitted slope is positive and it beats the
    constant fit decisively.
    """
    s = np.asarray(partial_sums, dtype=float)
    if s.size < 8:
        raise ValueError("need at least 8 partial sums for a trend")
    if np.any(np.diff(s) < -1e-9 * max(1.0, float(np.abs(s).max()))):
        raise ValueError("partial sums must be nondecreasing")
    half = s[s.size // 2 :]
    ls = np.arange(s.size // 2, s.size, dtype=float) + 1.0

    def fit(design: np.ndarray) -> tuple[float, np.ndarray]:
        coef, *_ = np.linalg.lstsq(design, half, rcond=None)
        resid = float(np.sum((half - design @ coef) ** 2))
        return resid, coef

    r_const, c_const = fit(np.ones((half.size, 1)))
    r_log, c_log = fit(np.column_stack([np.ones_like(ls), np.log(ls)]))
    r_lin, c_lin = fit(np.column_stack([np.ones_like(ls), ls]))

    # a divergent model must predict a material rise across the fit window,
    # otherwise a saturating sequence would win on residual alone
    scale = max(float(np.abs(half).max()), 1e-300)
    rise_log = float(c_log[1]) * (np.log(ls[-1]) - np.log(ls[0]))
    rise_lin = float(c_lin[1]) * (ls[-1] - ls[0])
    candidates = {"bounded": r_const}
    if rise_log > 0.02 * scale:
        candidates["log"] = r_log
    if rise_lin > 0.02 * scale:
        candidates["linear"] = r_lin
    model = min(candidates, key=candidates.get)
    detail = {
        "tail": half.tolist(),
        "residuals": {"bounded": r_const, "log": r_log, "linear": r_lin},
        "slopes": {"log": float(c_log[1]), "linear": float(c_lin[1])},
        "level": float(c_const[0]),
    }
    return RegularityVerdict(kind="numeric-trend", model=model, detail=detail)


def decay_factor(series: LayerSeries, l: int, scale: float = 1.0) -> float:
    """The capacity sum S(l) = sum_{j=2}^{l} (scale * a^{-j}) * gamma_j.

    This is the exponent sum of the decay estimate (up to the unknown
    universal constant); by scaling each term is just lambda_min of the
    unit-scale layer Gram times `scale`.
    """
    if l < 2:
        return 0.0
    if l > series.j_max or series.j_min > 2:
        raise ValueError("series does not cover layers 2..l")
    terms = series.terms
    i0 = 2 - series.j_min
    return float(scale * terms[i0 : i0 + (l - 1)].sum())
