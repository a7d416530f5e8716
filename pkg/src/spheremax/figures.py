"""Standalone SVG renderers for region geometry and scaling reports.

All output is deterministic: fixed hash salt, no timestamps, and text kept
as text elements so vertex labels stay searchable in the SVG source.
"""

from __future__ import annotations

import math

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .counterexamples import ScalingReport
from .region import RegionFigure

_SVG_RC = {
    "svg.fonttype": "none",
    "svg.hashsalt": "spheremax",
    "font.family": "DejaVu Sans",
}

_STRONG_FILL = "#b3cde3"
_H_COLOR = "#e41a1c"
_HI_COLOR = "#ff7f00"
_EDGE_COLOR = "#333333"


def _save(fig: Figure, path: str) -> None:
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})


def _fmt_label(text: str) -> str:
    return text.replace(",", ", ")


def _region_2d(fig: Figure, data: RegionFigure) -> None:
    ax = fig.add_subplot()
    square = [tuple(float(c) for c in v) for v in data.vertices]
    xs = [p[0] for p in square] + [square[0][0]]
    ys = [p[1] for p in square] + [square[0][1]]
    ax.fill(xs, ys, color=_STRONG_FILL, zorder=1, label="strong type")
    ax.plot(xs, ys, color=_EDGE_COLOR, lw=1.2, zorder=2)
    cube = [tuple(float(c) for c in v) for v in data.cube]
    cx = [p[0] for p in cube] + [cube[0][0]]
    cy = [p[1] for p in cube] + [cube[0][1]]
    ax.plot(cx, cy, color="#999999", lw=0.8, ls="--", zorder=0)
    for pt, text in data.labels:
        x, y = float(pt[0]), float(pt[1])
        dx = 0.02 if x < 0.25 else -0.02
        ha = "left" if x < 0.25 else "right"
        dy = 0.02 if y < 0.25 else -0.03
        ax.annotate(_fmt_label(text), (x, y), (x + dx, y + dy), ha=ha, fontsize=9)
        ax.plot([x], [y], "o", color=_EDGE_COLOR, ms=4, zorder=3)
    ax.set_xlim(-0.08, 1.05)
    ax.set_ylim(-0.08, 1.05)
    ax.set_xlabel("1/p1")
    ax.set_ylabel("1/p2")
    ax.set_aspect("equal")
    ax.set_title("bilinear exponent region (closure of the strong-type set)")


def _region_3d(fig: Figure, data: RegionFigure) -> None:
    # registers the 3d projection as an import side effect
    from mpl_toolkits.mplot3d.art3d import Poly3DCollection  # noqa: F401

    ax = fig.add_subplot(projection="3d")
    verts = [tuple(float(c) for c in v) for v in data.vertices]
    polys, colors = [], []
    for face in data.faces:
        polys.append([verts[i] for i in face.indices])
        if face.tag == "H":
            colors.append(_H_COLOR + "66")
        elif face.tag.startswith("H_"):
            colors.append(_HI_COLOR + "55")
        else:
            colors.append(_STRONG_FILL + "40")
    coll = Poly3DCollection(polys, facecolors=colors, edgecolors=_EDGE_COLOR,
                            linewidths=0.7)
    ax.add_collection3d(coll)
    for pt, text in data.labels:
        x, y, z = (float(c) for c in pt)
        ax.text(x, y, z, _fmt_label(text), fontsize=7)
    ax.scatter(*zip(*verts), color=_EDGE_COLOR, s=8)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_zlim(0, 1)
    ax.set_xlabel("1/p1")
    ax.set_ylabel("1/p2")
    ax.set_zlabel("1/p3")
    ax.set_title("trilinear exponent region; H face red, H_i faces orange")
    ax.view_init(elev=18.0, azim=32.0)


def save_region_figure(data: RegionFigure, path: str) -> None:
    """Render the exact region geometry to a labeled standalone SVG."""
    fig = Figure(figsize=(6.0, 5.4))
    if data.m == 2:
        _region_2d(fig, data)
    elif data.m == 3:
        _region_3d(fig, data)
    else:
        raise ValueError(f"no figure layout for m = {data.m}")
    if data.slice_value is not None and data.slice_polygon:
        # inset with the planar slice polygon at fixed last coordinate
        ax = fig.add_axes((0.66, 0.68, 0.3, 0.28))
        poly = [tuple(float(c) for c in p) for p in data.slice_polygon]
        xs = [p[0] for p in poly] + [poly[0][0]]
        ys = [p[1] for p in poly] + [poly[0][1]]
        ax.fill(xs, ys, color=_STRONG_FILL)
        ax.plot(xs, ys, color=_EDGE_COLOR, lw=0.9)
        ax.set_title(f"slice q3 = {data.slice_value}", fontsize=7)
        ax.tick_params(labelsize=6)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_aspect("equal")
    _save(fig, path)


def save_scaling_figure(report: ScalingReport, path: str) -> None:
    """Probe values with the fitted and expected trend lines."""
    fig = Figure(figsize=(6.0, 4.5))
    ax = fig.add_subplot()
    p = np.asarray(report.parameters)
    v = np.asarray(report.values)
    if report.fit_kind == "loglog":
        t = np.log(np.log(1.0 / p))
        ax.plot(t, v, "o", color=_EDGE_COLOR, label="quadrature value")
        ax.plot(t, report.fitted_slope * t + report.intercept, "-",
                color=_H_COLOR, label=f"fit, slope {report.fitted_slope:.4f}")
        if report.analytic is not None:
            ax.plot(t, np.asarray(report.analytic), "s--", color=_HI_COLOR,
                    ms=4, label="analytic lower bound")
        ax.set_xlabel("log log(1/eta)")
        ax.set_ylabel("truncated value")
    else:
        ax.loglog(p, v, "o", color=_EDGE_COLOR, label="probe value")
        fit = np.exp(report.intercept) * p**report.fitted_slope
        ax.loglog(p, fit, "-", color=_H_COLOR,
                  label=f"fit, slope {report.fitted_slope:.4f}")
        anchor = v[0] * (p / p[0]) ** report.expected_slope
        ax.loglog(p, anchor, "--", color="#666666",
                  label=f"slope {report.expected_slope:g} guide")
        ax.set_xlabel("probe parameter")
        ax.set_ylabel("maximal value")
    ax.legend(fontsize=8)
    ax.set_title(f"{report.family}: fitted {report.fitted_slope:.4f}, "
                 f"expected {report.expected_slope:g} ± {report.tolerance:g}")
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    _save(fig, path)


def save_domination_figure(lhs, rhs, path: str, title: str = "domination probes") -> None:
    """Scatter of spherical values against their averaged upper bounds."""
    fig = Figure(figsize=(5.4, 5.4))
    ax = fig.add_subplot()
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    keep = (lhs > 0) & (rhs > 0)
    ax.loglog(lhs[keep], rhs[keep], "o", ms=4, color=_EDGE_COLOR, alpha=0.7)
    if keep.any():
        lo = min(lhs[keep].min(), rhs[keep].min())
        hi = max(lhs[keep].max(), rhs[keep].max())
        guide = np.array([lo, hi])
        ax.loglog(guide, guide, "-", color=_H_COLOR, lw=1.0, label="equality")
    ax.set_xlabel("spherical maximal value")
    ax.set_ylabel("dominating bound")
    viol = int(np.sum(lhs > rhs * (1 + 1e-9)))
    ax.set_title(f"{title}: {lhs.size} probes, {viol} violations")
    if keep.any():
        ax.legend(fontsize=8)
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    _save(fig, path)


def save_lemma_figure(r1: float, r2: float, path: str) -> None:
    """Graph of u^-r1 (log 1/u)^-r2 on its decreasing range."""
    fig = Figure(figsize=(5.4, 4.0))
    ax = fig.add_subplot()
    u_max = math.exp(-r2 / r1)
    u = np.geomspace(u_max * 1e-8, u_max * (1 - 1e-9), 400)
    phi = u**-r1 * np.log(1.0 / u) ** -r2
    ax.loglog(u, phi, color=_EDGE_COLOR)
    ax.axvline(u_max, color=_H_COLOR, lw=0.8, ls="--",
               label="e^(-r2/r1) endpoint")
    ax.set_xlabel("u")
    ax.set_ylabel("u^-r1 (log 1/u)^-r2")
    ax.set_title(f"decreasing comparison weight, r1={r1:g}, r2={r2:g}")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    _save(fig, path)
