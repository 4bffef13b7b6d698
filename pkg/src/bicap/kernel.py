"""Fundamental solution of the 1-D operator  L = D^4 + 2 D^3 - D^2 - 2 D.

Writing the 3-D bilaplacian in logarithmic radial coordinates t = log(1/r)
produces, after separating the lowest angular modes, the constant-coefficient
operator ``L`` above.  Its fundamental solution ``g`` (L g = delta, g bounded,
g -> 0 as t -> +inf) is piecewise exponential:

    g(t) = (3 - e^t) / 6                 for t <  0
    g(t) = (3 e^-t - e^-2t) / 6          for t >= 0

``g`` is C^2 across t = 0; the third derivative jumps by exactly 1 there,
which normalises the delta.  Two derived weights drive the energy forms:

    w1(t) = -(g'' + g')        =  e^t/3          (t < 0),  e^-2t/3        (t >= 0)
    w2(t) = -(2 g'' + 3 g' - g) = (4 e^t + 3)/6  (t < 0),  (e^-2t + 6 e^-t)/6

Both are strictly positive; w2 dominates every derivative of g up to a
constant, which is what makes the induction across dyadic layers close.

All functions are vectorised over ``t`` and evaluate via expm1-based forms
so the two branches agree to machine precision at the splice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelSample",
    "g",
    "g_deriv",
    "ode_residual",
    "weight_w1",
    "weight_w2",
    "sample",
]


def _as_array(t) -> np.ndarray:
    return np.asarray(t, dtype=np.float64)


def g(t) -> np.ndarray:
    """Kernel value.  Range (0, 1/2]; g(0) = 1/3; g(-inf) = 1/2."""
    t = _as_array(t)
    neg = t < 0.0
    out = np.empty_like(t)
    # (3 - e^t)/6 = (2 - expm1(t))/6 ; (3e^-t - e^-2t)/6 = (2 + 3 expm1(-t) - expm1(-2t))/6
    out[neg] = (2.0 - np.expm1(t[neg])) / 6.0
    pos = ~neg
    out[pos] = (2.0 + 3.0 * np.expm1(-t[pos]) - np.expm1(-2.0 * t[pos])) / 6.0
    return out if out.ndim else float(out)


def _deriv_left(t: np.ndarray, order: int) -> np.ndarray:
    # every t-derivative of (3 - e^t)/6 is -e^t/6
    return -np.exp(t) / 6.0


def _deriv_right(t: np.ndarray, order: int) -> np.ndarray:
    # order-k derivative of (3 e^-t - e^-2t)/6
    return (3.0 * (-1.0) ** order * np.exp(-t) - (-2.0) ** order * np.exp(-2.0 * t)) / 6.0


def g_deriv(t, order: int, side: str | None = None) -> np.ndarray:
    """Branchwise derivative of ``g`` of the given order (1..4).

    ``g`` is C^2, so orders 1 and 2 are single-valued everywhere.  Orders 3
    and 4 jump at t = 0 (the jump of g''' is exactly 1); evaluating them *at*
    zero requires ``side`` ("left" or "right").  Elsewhere ``side`` is
    ignored and the branch containing ``t`` is used.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"order must be 1..4, got {order}")
    t = _as_array(t)
    at_zero = t == 0.0
    if order >= 3 and np.any(at_zero) and side not in ("left", "right"):
        raise ValueError("order >= 3 at t = 0 is two-valued: pass side='left' or side='right'")
    out = np.empty_like(t)
    if side == "left":
        neg = (t < 0.0) | at_zero
    else:
        neg = t < 0.0
    out[neg] = _deriv_left(t[neg], order)
    out[~neg] = _deriv_right(t[~neg], order)
    return out if out.ndim else float(out)


def ode_residual(t) -> np.ndarray:
    """L g evaluated branchwise: identically zero away from t = 0.

    Assembled from the four derivative branches, so the value measures pure
    floating-point cancellation (~1e-16), not a modelling error.
    """
    t = _as_array(t)
    r = (
        g_deriv(t, 4, side="right")
        + 2.0 * g_deriv(t, 3, side="right")
        - g_deriv(t, 2)
        - 2.0 * g_deriv(t, 1)
    )
    return r if r.ndim else float(r)


def weight_w1(t) -> np.ndarray:
    """w1 = -(g'' + g').  Positive, integrates to 1/2 over the line."""
    t = _as_array(t)
    out = np.where(t < 0.0, np.exp(t), np.exp(-2.0 * t)) / 3.0
    return out if out.ndim else float(out)


def weight_w2(t) -> np.ndarray:
    """w2 = -(2 g'' + 3 g' - g).  Positive; w2(0) = 7/6; dominates |D^k g|."""
    t = _as_array(t)
    neg = t < 0.0
    out = np.empty_like(t)
    out[neg] = (4.0 * np.exp(t[neg]) + 3.0) / 6.0
    pos = ~neg
    out[pos] = (np.exp(-2.0 * t[pos]) + 6.0 * np.exp(-t[pos])) / 6.0
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class KernelSample:
    """Kernel and all derivatives at one point; one-sided values for orders >= 3."""

    t: float
    g: float
    d1: float
    d2: float
    d3_left: float
    d3_right: float
    d4_left: float
    d4_right: float

    @property
    def d3_jump(self) -> float:
        return self.d3_right - self.d3_left


def sample(t: float) -> KernelSample:
    """Evaluate ``g`` and its four derivatives at a single point.

    Away from t = 0 the left/right pairs coincide (both evaluate the branch
    containing ``t``); at t = 0 they expose the genuine one-sided values.
    """
    t = float(t)
    if t == 0.0:
        d3l, d3r = g_deriv(0.0, 3, "left"), g_deriv(0.0, 3, "right")
        d4l, d4r = g_deriv(0.0, 4, "left"), g_deriv(0.0, 4, "right")
    else:
        d3l = d3r = g_deriv(t, 3)
        d4l = d4r = g_deriv(t, 4)
    return KernelSample(
        t=t,
        g=g(t),
        d1=g_deriv(t, 1),
        d2=g_deriv(t, 2),
        d3_left=float(d3l),
        d3_right=float(d3r),
        d4_left=float(d4l),
        d4_right=float(d4r),
    )
