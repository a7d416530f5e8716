"""Scaling families that defeat boundedness outside the region.

Each family evaluates certified lower bounds of a maximal operator along a
one-parameter probe sequence and fits the decay/growth exponent.  Values
are genuine quadrature values (never asserted limits): divergence is shown
by unbounded monotone growth along a truncation sequence, and any fit is
refused when the probe scale outruns the quadrature resolution.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._integrate import fit_power_law, kahan_sum, panel_integral
from .funcspec import Constant, Indicator, PowerLog, PowerLogTail
from .operators import TGrid, ball_average, multilinear_hl_max, spherical_maximal
from .region import ExponentPoint, check_conditions
from .sphere import (
    BallRule,
    CircleRule,
    SphereRule,
    build_ball_rule,
    build_circle_rule,
    build_sphere_rule,
)

DEFAULT_DELTAS = tuple(2.0**-k for k in range(3, 10))
DEFAULT_ETAS = tuple(10.0**-k for k in range(2, 9))
DEFAULT_XS_SMALL = (8.0, 16.0, 32.0, 64.0)
DEFAULT_XS = (8.0, 16.0, 32.0, 64.0, 128.0)
DEFAULT_XS_TAIL = (64.0, 128.0, 256.0, 512.0, 1024.0)
_A_PROBE_XS = (0.5, 0.75, 1.0)


class ResolutionGuardError(ValueError):
    """Probe scale finer than the quadrature rule can resolve."""


@dataclass(frozen=True)
class ScalingReport:
    """Probe parameters, measured values, and the fitted exponent.

    fit_kind "power" fits log(value) against log(parameter); the bilinear
    endpoint family uses fit_kind "loglog", fitting value against
    log log(1/parameter) since its growth is doubly logarithmic.
    """

    family: str
    parameters: tuple[float, ...]
    values: tuple[float, ...]
    fitted_slope: float
    intercept: float
    max_residual: float
    expected_slope: float
    tolerance: float
    fit_kind: str = "power"
    analytic: tuple[float, ...] | None = None
    compensated: tuple[float, ...] | None = None

    def ok(self) -> bool:
        return abs(self.fitted_slope - self.expected_slope) <= self.tolerance

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "parameters": list(self.parameters),
            "values": list(self.values),
            "fitted_slope": self.fitted_slope,
            "intercept": self.intercept,
            "max_residual": self.max_residual,
            "expected_slope": self.expected_slope,
            "tolerance": self.tolerance,
            "fit_kind": self.fit_kind,
            "ok": self.ok(),
        }
        if self.analytic is not None:
            out["analytic"] = list(self.analytic)
        if self.compensated is not None:
            out["compensated"] = list(self.compensated)
        return out

    def csv_text(self) -> str:
        buf = io.StringIO()
        cols = ["family", "parameter", "value", "fitted_slope", "expected_slope",
                "tolerance", "ok"]
        if self.analytic is not None:
            cols.append("analytic")
        if self.compensated is not None:
            cols.append("compensated")
        buf.write(",".join(cols) + "\n")
        for i, (p, v) in enumerate(zip(self.parameters, self.values)):
            row = [self.family, repr(p), repr(v), repr(self.fitted_slope),
                   repr(self.expected_slope), repr(self.tolerance), str(self.ok())]
            if self.analytic is not None:
                row.append(repr(self.analytic[i]))
            if self.compensated is not None:
                row.append(repr(self.compensated[i]))
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def _validate_monotone(params, decreasing: bool, what: str) -> None:
    arr = np.asarray(params, dtype=float)
    if arr.size < 2:
        raise ValueError(f"{what} needs at least two probe parameters")
    d = np.diff(arr)
    if decreasing and not np.all(d < 0):
        raise ValueError(f"{what} parameters must be strictly decreasing")
    if not decreasing and not np.all(d > 0):
        raise ValueError(f"{what} parameters must be strictly increasing")


def _guard(rule, half_width: float, t_max: float, family: str) -> None:
    window = 2.0 * half_width / t_max
    if rule.resolution() > window / 4.0:
        raise ResolutionGuardError(
            f"{family}: support half-width {half_width:g} at scale {t_max:g} needs node "
            f"spacing <= {window / 4.0:.3g}, rule has {rule.resolution():.3g}; "
            "refine the rule or shorten the probe range"
        )


def _probe_grid(t0: float) -> TGrid:
    return TGrid.around(t0, steps=8, ratio=1.02, local_refine_depth=12)


def _fit_report(family, params, values, expected, tol, decreasing, **extra) -> ScalingReport:
    vals = tuple(float(v) for v in values)
    if not all(v > 0 for v in vals):
        raise ArithmeticError(f"{family}: non-positive probe value, cannot fit a power law")
    slope, intercept, resid = fit_power_law(np.asarray(params), np.asarray(vals))
    return ScalingReport(
        family=family,
        parameters=tuple(float(p) for p in params),
        values=vals,
        fitted_slope=slope,
        intercept=intercept,
        max_residual=resid,
        expected_slope=expected,
        tolerance=tol,
        **extra,
    )


def _default_sphere(m: int) -> SphereRule:
    if m == 2:
        return build_circle_rule(13)
    if m == 3:
        return build_sphere_rule(3, 11, 10)
    return build_sphere_rule(m, 7, 4)


def _boundary_sphere(m: int) -> SphereRule:
    if m == 2:
        return build_circle_rule(13)
    if m == 3:
        return build_sphere_rule(3, 11, 12)
    return build_sphere_rule(m, 7, 4)


def cex_condition_a(m: int, deltas=None, rule: SphereRule | None = None,
                    grid: TGrid | None = None) -> ScalingReport:
    """All factors chi_[-delta,delta], probed near t = x*sqrt(m).

    The sphere through the corner of the support box carries measure of
    order delta^(m-1), which is the expected decay of the maximal value.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    deltas = DEFAULT_DELTAS if deltas is None else tuple(deltas)
    _validate_monotone(deltas, decreasing=True, what="condition_a")
    if max(deltas) > 0.125:
        raise ValueError("condition_a probes need deltas <= 1/8")
    rule = _default_sphere(m) if rule is None else rule
    _guard(rule, min(deltas), math.sqrt(m) * max(_A_PROBE_XS) * 1.2, "condition_a")
    values = []
    for d in deltas:
        fs = [Indicator(-d, d) for _ in range(m)]
        vmin = math.inf
        for x in _A_PROBE_XS:
            g = grid if grid is not None else _probe_grid(x * math.sqrt(m))
            vmin = min(vmin, spherical_maximal(fs, x, g, rule).value)
        values.append(vmin)
    return _fit_report("condition_a", deltas, values, expected=float(m - 1), tol=0.1,
                       decreasing=True)


def cex_condition_b(m: int, deltas=None, rule: SphereRule | None = None,
                    grid: TGrid | None = None) -> ScalingReport:
    """Wide first factor, thin others, probed near t = x*sqrt(m-1).

    The probe sphere is tangent to the first coordinate axis, which relaxes
    one thin constraint to a square root: decay delta^(m-3/2).
    """
    if m < 2:
        raise ValueError("need m >= 2")
    deltas = DEFAULT_DELTAS if deltas is None else tuple(deltas)
    _validate_monotone(deltas, decreasing=True, what="condition_b")
    rule = _default_sphere(m) if rule is None else rule
    _guard(rule, min(deltas), math.sqrt(m - 1) * max(_A_PROBE_XS) * 1.2, "condition_b")
    wide = Indicator(-10.0 * math.sqrt(m), 10.0 * math.sqrt(m))
    values = []
    for d in deltas:
        fs = [wide] + [Indicator(-d, d) for _ in range(m - 1)]
        vmin = math.inf
        for x in _A_PROBE_XS:
            g = grid if grid is not None else _probe_grid(x * math.sqrt(m - 1))
            vmin = min(vmin, spherical_maximal(fs, x, g, rule).value)
        values.append(vmin)
    return _fit_report("condition_b", deltas, values, expected=m - 1.5, tol=0.1,
                       decreasing=True)


def truncated_log_integral_exact(x: float, eta: float) -> float:
    """int_eta^x du / (u * log(1/u)) by the antiderivative -log log(1/u)."""
    if not 0.0 < eta < x < 1.0:
        raise ValueError("need 0 < eta < x < 1")
    return math.log(math.log(1.0 / eta)) - math.log(math.log(1.0 / x))


def truncated_log_integral_quad(x: float, eta: float, panels: int = 4096) -> float:
    """Same integral by direct panel quadrature in the variable w = log(1/u)."""
    # u = e^-w maps the integrand to 1/w on [log(1/x), log(1/eta)]
    return panel_integral(lambda w: 1.0 / w, math.log(1.0 / x), math.log(1.0 / eta),
                          panels=panels)


def analytic_l2_lower_bound(x: float, eta: float) -> float:
    """(1/sqrt(2x)) * (log log(1/eta) - log log(1/x)), the truncated chain value."""
    return truncated_log_integral_exact(x, eta) / math.sqrt(2.0 * x)


def cex_bilinear_L2(etas=None, x: float = 0.25,
                    rule: CircleRule | None = None) -> ScalingReport:
    """Endpoint pair q = (1/2, 1/2): truncations grow like log log(1/eta).

    f = |u|^(-1/2) (-log|u|)^(-1) on [-1/2, 1/2] and g = chi_[-10,10] at the
    scale t = x.  The quarter-arc integral (unnormalized, in the angle
    variable) with f's argument truncated to |u| >= eta dominates the
    analytic bound (1/sqrt(2x)) * (log log(1/eta) - log log(1/x)) and grows
    without bound, affinely in log log(1/eta).
    """
    etas = DEFAULT_ETAS if etas is None else tuple(etas)
    _validate_monotone(etas, decreasing=True, what="bilinear_l2")
    if not 0.25 <= x <= 0.5:
        raise ValueError(f"x must lie in [1/4, 1/2], got {x}")
    if max(etas) >= math.exp(-2.0):
        raise ValueError("etas must be below e^-2")
    if rule is None:
        rule = build_circle_rule(16)
    n = rule.npoints
    quarter = slice(0, n // 4)
    y1 = rule.y1[quarter]
    y2 = rule.y2[quarter]
    h = rule.spacing
    f = PowerLog(0.5, 1.0, 0.5)
    g = Indicator(-10.0, 10.0)
    base = f.values(x - x * y1) * g.values(x - x * y2)
    args = np.abs(x - x * y1)
    values = []
    analytic = []
    for eta in etas:
        vals = base * (args >= eta)
        values.append(h * kahan_sum(vals))
        analytic.append(analytic_l2_lower_bound(x, eta))
    ll = np.log(np.log(1.0 / np.asarray(etas)))
    slope, intercept = np.polyfit(ll, np.asarray(values), 1)
    resid = float(np.max(np.abs(np.asarray(values) - (slope * ll + intercept))))
    expected = 1.0 / math.sqrt(2.0 * x)
    return ScalingReport(
        family="bilinear_l2",
        parameters=tuple(float(e) for e in etas),
        values=tuple(float(v) for v in values),
        fitted_slope=float(slope),
        intercept=float(intercept),
        max_residual=resid,
        expected_slope=expected,
        tolerance=0.1 * expected,
        fit_kind="loglog",
        analytic=tuple(analytic),
    )


def _powerlog_factors(q) -> list[PowerLog]:
    return [PowerLog(float(v), 2.0 * float(v), 0.5) for v in q]


def cex_H(m: int, q, xs=None, rule: SphereRule | None = None,
          grid: TGrid | None = None) -> ScalingReport:
    """Borderline power-log factors on the face sum(q) = m-1: decay x^(1-m).

    Factors f_i = |u|^(-q_i) (-log|u|)^(-2q_i) on [-1/2, 1/2], probed near
    t = x*sqrt(m); membership of q in H is checked exactly.
    """
    pt = ExponentPoint(tuple(Fraction(v) for v in q))
    if pt.m != m:
        raise ValueError(f"q has {pt.m} entries, expected {m}")
    if not check_conditions(pt).in_H:
        raise ValueError(f"q = {pt.q} does not lie in H")
    xs = (DEFAULT_XS if m == 2 else DEFAULT_XS_SMALL) if xs is None else tuple(xs)
    _validate_monotone(xs, decreasing=False, what="H")
    if min(xs) < 8.0:
        raise ValueError("H probes need xs >= 8")
    rule = _boundary_sphere(m) if rule is None else rule
    _guard(rule, 0.5, math.sqrt(m) * max(xs) * 1.2, "H")
    fs = _powerlog_factors(pt.q)
    values = []
    for x in xs:
        g = grid if grid is not None else _probe_grid(x * math.sqrt(m))
        values.append(spherical_maximal(fs, x, g, rule).value)
    return _fit_report("H", xs, values, expected=float(1 - m),
                       tol=0.1 if m == 2 else 0.15, decreasing=False)


def cex_Hi(m: int, q, xs=None, rule: SphereRule | None = None,
           grid: TGrid | None = None) -> ScalingReport:
    """Tail-type last factor on the face sum_{j<m} q_j = m-3/2.

    f_m = |u|^(-q_m) (log|u|)^(-2q_m) on |u| >= 2, the others power-log as
    in the H family, probed near t = x*sqrt(m-1).  The decay is
    x^(-sum q) up to a slowly varying log factor; the fit targets the pure
    power and the log-compensated values are reported alongside.
    """
    pt = ExponentPoint(tuple(Fraction(v) for v in q))
    if pt.m != m:
        raise ValueError(f"q has {pt.m} entries, expected {m}")
    if not check_conditions(pt).in_H_i[m - 1]:
        raise ValueError(f"q = {pt.q} does not lie in H_{m}")
    # tail families sit higher on the x axis so the slowly varying log
    # factor contributes less drift to the fitted power
    xs = (DEFAULT_XS_TAIL if m == 2 else DEFAULT_XS_SMALL) if xs is None else tuple(xs)
    _validate_monotone(xs, decreasing=False, what="H_i")
    if min(xs) < 8.0:
        raise ValueError("H_i probes need xs >= 8")
    rule = _boundary_sphere(m) if rule is None else rule
    _guard(rule, 0.5, math.sqrt(m - 1) * max(xs) * 1.2, "H_i")
    qf = [float(v) for v in pt.q]
    fs = _powerlog_factors(pt.q[:-1]) + [PowerLogTail(qf[-1], 2.0 * qf[-1], 2.0)]
    recip_p = sum(qf)
    values = []
    compensated = []
    for x in xs:
        g = grid if grid is not None else _probe_grid(x * math.sqrt(m - 1))
        v = spherical_maximal(fs, x, g, rule).value
        values.append(v)
        compensated.append(v * x**recip_p * math.log(x) ** (2.0 * qf[-1]))
    return _fit_report("H_i", xs, values, expected=-recip_p,
                       tol=0.15 if m == 2 else 0.2, decreasing=False,
                       compensated=tuple(compensated))


def cex_corner(m: int, k: int, xs=None, rule: BallRule | None = None,
               grid: TGrid | None = None) -> ScalingReport:
    """Corner exponents: k indicator factors, the rest constant 1.

    The constant factors average to 1, so the displayed lower bound is the
    k-linear ball average of chi_(-1,1) factors probed near t = x*sqrt(k),
    where the support box touches the sphere of directions: decay x^-k.
    """
    if not 1 <= k <= m - 1:
        raise ValueError(f"need 1 <= k <= m-1, got k={k}, m={m}")
    xs = DEFAULT_XS if xs is None else tuple(xs)
    _validate_monotone(xs, decreasing=False, what="corner")
    if min(xs) < 4.0:
        raise ValueError("corner probes need xs >= 4")
    if rule is None:
        rule = build_ball_rule(k, 12, 12) if k <= 2 else build_ball_rule(k, 6, 3)
    if rule.m != k:
        raise ValueError(f"ball rule dimension {rule.m} != k = {k}")
    _guard(rule, 1.0, math.sqrt(k) * max(xs) * 1.2, "corner")
    fs = [Indicator(-1.0, 1.0) for _ in range(k)]
    values = []
    for x in xs:
        g = grid if grid is not None else _probe_grid(x * math.sqrt(k))
        values.append(multilinear_hl_max(fs, x, g, rule))
    return _fit_report("corner", xs, values, expected=float(-k), tol=0.1,
                       decreasing=False)


@dataclass(frozen=True)
class LemmaReport:
    """Empirical constant for the decreasing power-log comparison."""

    r1: float
    r2: float
    C: float
    max_ratio: float
    C_prime: float
    ok: bool
    monotone_violations: int
    samples: int

    def to_dict(self) -> dict:
        return {
            "r1": self.r1, "r2": self.r2, "C": self.C,
            "max_ratio": self.max_ratio, "C_prime": self.C_prime,
            "ok": self.ok, "monotone_violations": self.monotone_violations,
            "samples": self.samples,
        }


def lemma_check(r1: float, r2: float, C: float = 1.0, samples: int = 2000,
                seed: int = 0) -> LemmaReport:
    """Sample phi(s)/phi(t) for t <= C*s with phi(u) = u^-r1 (log 1/u)^-r2.

    Both arguments stay below e^(-r2/r1), where (log phi)' =
    -(r1 - r2/log(1/u))/u < 0, so phi is strictly decreasing there; with
    C = 1 the ratio can never exceed 1.  Also counts violations of that
    monotonicity over the sampled points.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("need r1, r2 > 0")
    if C < 1.0:
        raise ValueError("need C >= 1")
    if samples < 1:
        raise ValueError("need samples >= 1")
    u_max = math.exp(-r2 / r1)
    rng = np.random.default_rng(seed)

    def phi(u: np.ndarray) -> np.ndarray:
        return u**-r1 * np.log(1.0 / u) ** -r2

    s = u_max * 10.0 ** -rng.uniform(1e-12, 12.0, samples)
    cap = np.minimum(C * s, u_max * (1.0 - 1e-15))
    t = cap * 10.0 ** -rng.uniform(0.0, 12.0, samples)
    ratios = phi(s) / phi(t)
    max_ratio = float(np.max(ratios))

    u = np.sort(u_max * 10.0 ** -rng.uniform(1e-12, 12.0, samples))
    pv = phi(u)
    violations = int(np.sum(np.diff(pv) > 0))

    return LemmaReport(
        r1=float(r1), r2=float(r2), C=float(C),
        max_ratio=max_ratio, C_prime=max_ratio,
        ok=bool(math.isfinite(max_ratio)),
        monotone_violations=violations,
        samples=int(samples),
    )
