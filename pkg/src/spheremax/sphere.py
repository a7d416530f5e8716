"""Quadrature rules for the normalized measures on S^{m-1} and B^m.

The circle rule places uniform midpoint angles, which absorbs the arc-length
weight exactly.  Higher dimensions slice off the last coordinate s with
weight (1 - s^2)^((m-3)/2) (sphere) or (1 - s^2)^((m-1)/2) (ball) and tensor
a scaled lower-dimensional rule across the slices.  All weights are
self-calibrated so they sum to exactly 1, making every rule an average.

Rules are immutable value objects: build once, share freely.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from ._integrate import kahan_sum, panel_nodes

MAX_CIRCLE_NODES = 1 << 21
MAX_SLICE_NODES = 1 << 17
MAX_JACOBI_NODES = 1 << 13
MAX_FLAT_POINTS = 1 << 22

SQRT_HALF = math.sqrt(0.5)


class ResourceLimitError(Exception):
    """Requested rule would exceed a configured node-count cap."""


def _check_level(level: int) -> None:
    if not isinstance(level, int) or level < 0:
        raise ValueError(f"level must be a non-negative integer, got {level!r}")


def _circle_count(level: int) -> int:
    n = 8 * (1 << level)
    if n > MAX_CIRCLE_NODES:
        raise ResourceLimitError(
            f"circle rule at level {level} needs {n} nodes (cap {MAX_CIRCLE_NODES})"
        )
    return n


def _slice_nodes(exponent: float, level: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_-1^1 (1-s^2)^exponent g(s) ds, weight folded in."""
    n = 8 * (1 << level)
    if exponent == 0.0:
        # composite Gauss-Legendre on uniform panels; scales to large n
        if n > MAX_SLICE_NODES:
            raise ResourceLimitError(f"slice rule needs {n} nodes (cap {MAX_SLICE_NODES})")
        return panel_nodes(-1.0, 1.0, n // 8, 8)
    if exponent == 0.5:
        # Gauss-Chebyshev second kind, closed form
        if n > MAX_SLICE_NODES:
            raise ResourceLimitError(f"slice rule needs {n} nodes (cap {MAX_SLICE_NODES})")
        k = np.arange(1, n + 1)
        ang = k * math.pi / (n + 1)
        return np.cos(ang)[::-1].copy(), (np.sin(ang) ** 2)[::-1].copy()
    if n > MAX_JACOBI_NODES:
        raise ResourceLimitError(
            f"Gauss-Jacobi slice rule needs {n} nodes (cap {MAX_JACOBI_NODES})"
        )
    return _jacobi_cached(n, exponent)


@lru_cache(maxsize=32)
def _jacobi_cached(n: int, exponent: float) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_jacobi(n, exponent, exponent)
    return nodes, weights


@dataclass(frozen=True)
class CircleRule:
    """Uniform midpoint-angle rule on S^1: theta_j = (j + 1/2) * 2pi/N."""

    level: int
    theta: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    w: np.ndarray

    m = 2

    @property
    def npoints(self) -> int:
        return self.theta.size

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.npoints

    def points(self) -> np.ndarray:
        return np.column_stack([self.y1, self.y2])

    def weights(self) -> np.ndarray:
        return self.w

    def resolution(self) -> float:
        return self.spacing

    def integrate(self, fn) -> float:
        return kahan_sum(self.w * np.asarray(fn(self.points()), dtype=float))

    def refined(self) -> "CircleRule":
        return build_circle_rule(self.level + 1)


def build_circle_rule(level: int) -> CircleRule:
    _check_level(level)
    n = _circle_count(level)
    theta = (np.arange(n) + 0.5) * (2.0 * math.pi / n)
    w = np.full(n, 1.0 / n)
    return CircleRule(level=level, theta=theta, y1=np.cos(theta), y2=np.sin(theta), w=w)


@dataclass(frozen=True)
class TensorSphereRule:
    """S^{m-1} rule: slices in s = y_m tensored with a scaled S^{m-2} rule."""

    m: int
    level: int
    slice_level: int
    slice_s: np.ndarray
    slice_w: np.ndarray
    radii: np.ndarray
    sub: "SphereRule"

    @property
    def npoints(self) -> int:
        return self.slice_s.size * self.sub.npoints

    def points(self) -> np.ndarray:
        if self.npoints > MAX_FLAT_POINTS:
            raise ResourceLimitError(
                f"{self.npoints} nodes is too many to materialize; "
                "use the factored operator evaluators"
            )
        sub_pts = self.sub.points()
        blocks = [
            np.column_stack([r * sub_pts, np.full(sub_pts.shape[0], s)])
            for s, r in zip(self.slice_s, self.radii)
        ]
        return np.vstack(blocks)

    def weights(self) -> np.ndarray:
        if self.npoints > MAX_FLAT_POINTS:
            raise ResourceLimitError(
                f"{self.npoints} nodes is too many to materialize; "
                "use the factored operator evaluators"
            )
        return (self.slice_w[:, None] * self.sub.weights()[None, :]).ravel()

    def resolution(self) -> float:
        gaps = np.diff(self.slice_s)
        return max(float(gaps.max()), self.sub.resolution())

    def integrate(self, fn) -> float:
        return kahan_sum(self.weights() * np.asarray(fn(self.points()), dtype=float))

    def refined(self) -> "TensorSphereRule":
        return build_sphere_rule(self.m, self.level + 1, self.slice_level + 1)


SphereRule = CircleRule | TensorSphereRule


def build_sphere_rule(m: int, level: int, slice_level: int | None = None) -> SphereRule:
    """Rule for the normalized surface measure on S^{m-1}.

    slice_level controls the slice resolution of every tensor stage
    separately from the base circle; it defaults to level.
    """
    if not isinstance(m, int) or m < 2:
        raise ValueError(f"sphere rule needs integer m >= 2, got {m!r}")
    _check_level(level)
    if slice_level is None:
        slice_level = level
    _check_level(slice_level)
    if m == 2:
        return build_circle_rule(level)
    sub = build_sphere_rule(m - 1, level, slice_level)
    s, w = _slice_nodes((m - 3) / 2.0, slice_level)
    w = w / kahan_sum(w)
    return TensorSphereRule(
        m=m,
        level=level,
        slice_level=slice_level,
        slice_s=s,
        slice_w=w,
        radii=np.sqrt(1.0 - s * s),
        sub=sub,
    )


@dataclass(frozen=True)
class IntervalRule:
    """Normalized average over [-1, 1] by composite Gauss-Legendre panels."""

    level: int
    y: np.ndarray
    w: np.ndarray

    m = 1

    @property
    def npoints(self) -> int:
        return self.y.size

    def points(self) -> np.ndarray:
        return self.y[:, None]

    def weights(self) -> np.ndarray:
        return self.w

    def resolution(self) -> float:
        return float(np.diff(self.y).max())

    def integrate(self, fn) -> float:
        return kahan_sum(self.w * np.asarray(fn(self.points()), dtype=float))

    def refined(self) -> "IntervalRule":
        return build_interval_rule(self.level + 1)


def build_interval_rule(level: int) -> IntervalRule:
    _check_level(level)
    n = 8 * (1 << level)
    if n > MAX_SLICE_NODES:
        raise ResourceLimitError(f"interval rule needs {n} nodes (cap {MAX_SLICE_NODES})")
    y, w = panel_nodes(-1.0, 1.0, n // 8, 8)
    return IntervalRule(level=level, y=y, w=w / kahan_sum(w))


@dataclass(frozen=True)
class TensorBallRule:
    """B^m rule: slices in s = y_m tensored with a scaled B^{m-1} rule."""

    m: int
    level: int
    slice_level: int
    slice_s: np.ndarray
    slice_w: np.ndarray
    radii: np.ndarray
    sub: "BallRule"

    @property
    def npoints(self) -> int:
        return self.slice_s.size * self.sub.npoints

    def points(self) -> np.ndarray:
        if self.npoints > MAX_FLAT_POINTS:
            raise ResourceLimitError(
                f"{self.npoints} nodes is too many to materialize; "
                "use the factored operator evaluators"
            )
        sub_pts = self.sub.points()
        blocks = [
            np.column_stack([r * sub_pts, np.full(sub_pts.shape[0], s)])
            for s, r in zip(self.slice_s, self.radii)
        ]
        return np.vstack(blocks)

    def weights(self) -> np.ndarray:
        if self.npoints > MAX_FLAT_POINTS:
            raise ResourceLimitError(
                f"{self.npoints} nodes is too many to materialize; "
                "use the factored operator evaluators"
            )
        return (self.slice_w[:, None] * self.sub.weights()[None, :]).ravel()

    def resolution(self) -> float:
        gaps = np.diff(self.slice_s)
        return max(float(gaps.max()), self.sub.resolution())

    def integrate(self, fn) -> float:
        return kahan_sum(self.weights() * np.asarray(fn(self.points()), dtype=float))

    def refined(self) -> "TensorBallRule":
        return build_ball_rule(self.m, self.level + 1, self.slice_level + 1)


BallRule = IntervalRule | TensorBallRule


def build_ball_rule(m: int, level: int, slice_level: int | None = None) -> BallRule:
    """Rule for the normalized volume measure on B^m."""
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"ball rule needs integer m >= 1, got {m!r}")
    _check_level(level)
    if slice_level is None:
        slice_level = level
    _check_level(slice_level)
    if m == 1:
        return build_interval_rule(level)
    sub = build_ball_rule(m - 1, level, slice_level)
    s, w = _slice_nodes((m - 1) / 2.0, slice_level)
    w = w / kahan_sum(w)
    return TensorBallRule(
        m=m,
        level=level,
        slice_level=slice_level,
        slice_s=s,
        slice_w=w,
        radii=np.sqrt(1.0 - s * s),
        sub=sub,
    )


def refine(rule):
    """Same construction one level finer (all stages bumped together)."""
    return rule.refined()


@dataclass(frozen=True)
class SectorCircleRule:
    """Alternative S^1 construction for cross-validation.

    Parametrizes the arc {0 < y1 < y2} by u = y1 in (0, 1/sqrt2) with weight
    density 1/sqrt(1 - u^2), integrated by Gauss-Legendre, then mirrors the
    sector nodes over the eight dihedral images.  Agrees with the
    angle-parametrized rule on smooth integrands but is built differently,
    so shared bugs are unlikely.
    """

    level: int
    pts: np.ndarray
    w: np.ndarray

    m = 2

    @property
    def npoints(self) -> int:
        return self.pts.shape[0]

    def points(self) -> np.ndarray:
        return self.pts

    def weights(self) -> np.ndarray:
        return self.w

    def integrate(self, fn) -> float:
        return kahan_sum(self.w * np.asarray(fn(self.pts), dtype=float))


def build_sector_circle_rule(level: int) -> SectorCircleRule:
    _check_level(level)
    n_sector = 1 << level
    if 8 * n_sector > MAX_CIRCLE_NODES:
        raise ResourceLimitError(
            f"sector rule at level {level} needs {8 * n_sector} nodes"
        )
    if n_sector >= 8:
        u, gw = panel_nodes(0.0, SQRT_HALF, n_sector // 8, 8)
    else:
        from scipy.special import roots_legendre

        base, bw = roots_legendre(n_sector)
        u = 0.5 * SQRT_HALF * (base + 1.0)
        gw = 0.5 * SQRT_HALF * bw
    v = np.sqrt(1.0 - u * u)
    w_sector = gw / v
    images = [
        np.column_stack([u, v]),
        np.column_stack([v, u]),
        np.column_stack([-u, v]),
        np.column_stack([v, -u]),
        np.column_stack([u, -v]),
        np.column_stack([-v, u]),
        np.column_stack([-u, -v]),
        np.column_stack([-v, -u]),
    ]
    pts = np.vstack(images)
    w = np.tile(w_sector, 8)
    return SectorCircleRule(level=level, pts=pts, w=w / kahan_sum(w))


def mc_sphere_integral(fn, m: int, n_samples: int = 100_000, seed: int = 0):
    """Monte Carlo average of fn over S^{m-1}: (estimate, standard_error).

    Uniform sampling by Gaussian normalization; fn takes an (k, m) array.
    """
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        k = min(n_samples - done, 1 << 17)
        g = rng.standard_normal((k, m))
        norms = np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        vals = np.asarray(fn(g / norms), dtype=float)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += k
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    return mean, math.sqrt(var / n_samples)


def mc_ball_integral(fn, m: int, n_samples: int = 100_000, seed: int = 0):
    """Monte Carlo average of fn over B^m: (estimate, standard_error)."""
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        k = min(n_samples - done, 1 << 17)
        g = rng.standard_normal((k, m))
        norms = np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        radii = rng.random((k, 1)) ** (1.0 / m)
        vals = np.asarray(fn(radii * g / norms), dtype=float)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += k
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    return mean, math.sqrt(var / n_samples)


def dump_rule_csv(rule, path) -> None:
    """Write one node per row: y-coordinates then weight."""
    pts = rule.points()
    w = rule.weights()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"y{i + 1}" for i in range(pts.shape[1])] + ["weight"])
        for row, wt in zip(pts, w):
            writer.writerow([repr(float(c)) for c in row] + [repr(float(wt))])
