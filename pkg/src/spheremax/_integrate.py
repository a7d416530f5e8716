"""Shared 1-D quadrature helpers: compensated sums, panel rules, power weights."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

_KAHAN_BLOCK = 4096


def kahan_sum(values: np.ndarray) -> float:
    """Compensated sum: Kahan over numpy pairwise block sums.

    Deterministic for a fixed input order; error stays O(eps * sum|v|)
    independent of length.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0.0
    total = 0.0
    comp = 0.0
    for start in range(0, v.size, _KAHAN_BLOCK):
        term = float(np.sum(v[start : start + _KAHAN_BLOCK]))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@lru_cache(maxsize=8)
def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(order)
    return nodes, weights


def panel_nodes(lo: float, hi: float, panels: int, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [lo, hi] with uniform panels."""
    base_x, base_w = _gl_nodes(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    xs = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    ws = (half[:, None] * base_w[None, :]).ravel()
    return xs, ws


def panel_integral(fn, lo: float, hi: float, panels: int = 256, order: int = 8) -> float:
    """Integrate a vectorized fn over [lo, hi] by composite Gauss-Legendre."""
    if hi <= lo:
        return 0.0
    xs, ws = panel_nodes(lo, hi, panels, order)
    return kahan_sum(ws * fn(xs))


def power_weight_integral(phi, a: float, upper: float, panels: int = 256, order: int = 8) -> float:
    """int_0^upper v^-a phi(v) dv for a < 1, phi vectorized and bounded near 0.

    For 0 < a < 1 the substitution u = v^(1-a)/(1-a) absorbs the weight
    exactly (v^-a dv = du), so the grading toward v = 0 is built into the
    change of variables and plain panels suffice.  For a <= 0 the weight
    is continuous and is integrated directly.
    """
    if upper <= 0.0:
        return 0.0
    if not a < 1.0:
        raise ValueError(f"power weight needs a < 1, got {a}")
    if a <= 0.0:
        return panel_integral(lambda v: v ** -a * phi(v), 0.0, upper, panels, order)
    c = 1.0 - a
    u_hi = upper**c / c
    xs, ws = panel_nodes(0.0, u_hi, panels, order)
    v = (c * xs) ** (1.0 / c)
    return kahan_sum(ws * phi(v))


def fit_power_law(params: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    """Least-squares fit of log(value) against log(param).

    Returns (slope, intercept, max_residual) with the residual measured in
    log space.  All values must be strictly positive.
    """
    lp = np.log(np.asarray(params, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(lp)) or not np.all(np.isfinite(lv)):
        raise ValueError("power-law fit needs positive finite params and values")
    slope, intercept = np.polyfit(lp, lv, 1)
    resid = lv - (slope * lp + intercept)
    return float(slope), float(intercept), float(np.max(np.abs(resid)))
