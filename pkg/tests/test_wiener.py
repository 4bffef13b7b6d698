"""Layer series: unit-scale caching, both regularity sums, trend fitting."""

import numpy as np
import pytest

from bicap.capacity import cap_inf
from bicap.sphgrid import CuspLayer
from bicap.wiener import (
    CuspLayers,
    EmptyLayers,
    FullLayers,
    LayerSeries,
    SingleLayer,
    decay_factor,
    layer_capacities,
    necessity_sum,
    sufficiency_sum,
    verdict,
)


def _shell(r_lo=1.0, r_hi=2.0):
    return CuspLayer(lambda r: np.full_like(np.asarray(r, float), np.pi), r_lo, r_hi)


def test_empty_layers_all_zero():
    series = layer_capacities(EmptyLayers(), a=2.0, j_max=9, n=25)
    assert np.all(series.terms == 0.0)
    assert np.all(sufficiency_sum(series) == 0.0)
    assert series.stats["gram_solves"] == 0
    v = verdict(sufficiency_sum(series))
    assert v.model == "bounded"
    assert not v.suggests_divergence


def test_full_layers_linear_growth():
    series = layer_capacities(FullLayers(), a=2.0, j_max=9, n=25)
    # identical unit-scale geometry: one solve serves every layer
    assert series.stats["gram_solves"] == 1
    assert np.all(series.terms > 0.0)
    assert np.allclose(series.terms, series.terms[0])
    v = verdict(sufficiency_sum(series))
    assert v.model == "linear"
    assert v.suggests_divergence


def test_single_layer_bounded():
    series = layer_capacities(SingleLayer(3, _shell()), a=2.0, j_max=9, n=25)
    assert series.stats["gram_solves"] == 1
    terms = series.terms
    assert terms[3] > 0.0
    assert np.all(terms[np.arange(10) != 3] == 0.0)
    v = verdict(sufficiency_sum(series))
    assert v.model == "bounded"


def test_gamma_rescales_terms():
    series = layer_capacities(FullLayers(), a=2.0, j_max=8, n=25)
    for j in (0, 3, 8):
        assert series.gamma(j) == pytest.approx(2.0**j * series.terms[j], rel=1e-12)


def test_layer_ratio_floor():
    with pytest.raises(ValueError, match=">= 2"):
        LayerSeries(a=1.5, j_min=0, j_max=1, doubled=False, grams_hat=(np.zeros((4, 4)),) * 2)


def test_necessity_requires_doubled():
    series = layer_capacities(FullLayers(), a=2.0, j_max=8, n=25)
    with pytest.raises(ValueError, match="doubled"):
        necessity_sum(series)


def test_necessity_dominates_sufficiency():
    # lambda_min is superadditive on PSD matrices: the single-profile
    # infimum of the summed Grams dominates the sum of per-layer infima
    series = layer_capacities(FullLayers(), a=2.0, j_max=8, n=25, doubled=True)
    nec, b = necessity_sum(series)
    suf = sufficiency_sum(series)
    assert np.all(np.diff(nec) >= -1e-12)
    assert np.all(nec >= suf - 1e-9 * np.maximum(1.0, np.abs(suf)))
    assert np.linalg.norm(b) == pytest.approx(1.0, rel=1e-10)
    # and any fixed profile gives an upper bound for the infimum
    e1 = np.array([1.0, 0.0, 0.0, 0.0])
    fixed = np.cumsum([float(e1 @ g @ e1) for g in series.grams_hat])
    assert np.all(nec <= fixed + 1e-9 * np.maximum(1.0, fixed))


def test_cusp_layers_unit_scale_economy():
    # constant-aperture profile: every rescaled layer is identical, the
    # label keys collapse per j but the geometry is re-solved per key
    fam = CuspLayers(lambda r: np.full_like(np.asarray(r, float), 0.5), label="const05")
    series = layer_capacities(fam, a=2.0, j_max=5, n=25)
    assert np.all(series.terms > 0.0)
    assert np.allclose(series.terms, series.terms[0], rtol=1e-10)


def test_verdict_on_synthetic_sequences():
    ls = np.arange(1.0, 17.0)
    assert verdict(np.full(16, 3.0)).model == "bounded"
    assert verdict(3.0 + 0.0001 * ls).model == "bounded"  # immaterial rise
    assert verdict(2.0 * np.log(ls) + 1.0).model == "log"
    assert verdict(0.7 * ls).model == "linear"
    with pytest.raises(ValueError, match="at least 8"):
        verdict(np.ones(5))
    with pytest.raises(ValueError, match="nondecreasing"):
        verdict(np.array([1.0, 2.0, 1.5, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]))


def test_verdict_log_vs_linear_separation():
    ls = np.arange(1.0, 25.0)
    assert verdict(5.0 * np.log(ls)).model == "log"
    assert verdict(0.1 * ls + 0.5 * np.log(ls)).model == "linear"


def test_decay_factor_matches_partial_sums():
    series = layer_capacities(FullLayers(), a=2.0, j_max=6, n=25)
    t = series.terms
    assert decay_factor(series, 1) == 0.0
    assert decay_factor(series, 4) == pytest.approx(float(t[2:5].sum()), rel=1e-12)
    assert decay_factor(series, 4, scale=3.0) == pytest.approx(3.0 * float(t[2:5].sum()), rel=1e-12)
    with pytest.raises(ValueError):
        decay_factor(series, 9)


def test_doubled_layers_positive_and_flagged():
    doubled = layer_capacities(FullLayers(), a=2.0, j_max=2, n=25, doubled=True)
    assert doubled.doubled
    assert np.all(doubled.terms > 0.0)
    v, b = cap_inf(doubled.grams_hat[0])
    assert v > 0.0 and np.linalg.norm(b) == pytest.approx(1.0, rel=1e-10)
