"""Catalog of the test functions used throughout the package.

Four shapes cover everything the operators and counterexample families need:

    Indicator(a, b)            chi_[a,b](x)
    PowerLog(alpha, beta, s)   |x|^-alpha * (-log|x|)^-beta * chi_[-s,s](x),  0 < s < 1
    PowerLogTail(alpha, beta, R)  |x|^-alpha * (log|x|)^-beta * chi_{|x|>=R}(x),  R >= 2
    Constant(c)                c

Values are always >= 0.  A PowerLog with alpha > 0 is singular at the
origin; evaluating there returns math.inf, the same sentinel lp_norm uses
for divergent norms.  The support restrictions (s < 1, R >= 2) keep the
log factors strictly positive on the support, so every value is finite
away from the single singular point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

INF = math.inf

__all__ = [
    "INF",
    "Indicator",
    "PowerLog",
    "PowerLogTail",
    "Constant",
    "FunctionSpec",
    "from_json",
    "to_json",
]


@dataclass(frozen=True)
class Indicator:
    """chi_[a,b]. Requires a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"indicator needs finite a < b, got [{self.a}, {self.b}]")

    def value(self, x: float) -> float:
        return 1.0 if self.a <= x <= self.b else 0.0

    def values(self, xs: np.ndarray) -> np.ndarray:
        return ((xs >= self.a) & (xs <= self.b)).astype(float)

    def lp_norm(self, p: float) -> float:
        _check_p(p)
        if p == INF:
            return 1.0
        return (self.b - self.a) ** (1.0 / p)

    def support(self) -> tuple[tuple[float, float], ...]:
        return ((self.a, self.b),)

    def to_dict(self) -> dict:
        return {"kind": "indicator", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class PowerLog:
    """|x|^-alpha (-log|x|)^-beta on [-s, s] with 0 < s < 1.

    On the support -log|x| >= -log(s) > 0, so only x = 0 is delicate:
    value(0) is inf when alpha > 0, and 0 when alpha = 0 < beta (the log
    factor kills it), and 1 when alpha = beta = 0.
    """

    alpha: float
    beta: float
    s: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0,1), got {self.s}")

    def value(self, x: float) -> float:
        r = abs(x)
        if r > self.s:
            return 0.0
        if r == 0.0:
            if self.alpha > 0:
                return INF
            return 0.0 if self.beta > 0 else 1.0
        try:
            return r ** -self.alpha * (-math.log(r)) ** -self.beta
        except OverflowError:
            # saturate like the vector path instead of raising near r = 0
            log_val = -self.alpha * math.log(r) - self.beta * math.log(-math.log(r))
            return math.exp(log_val) if log_val < 709.0 else INF

    def values(self, xs: np.ndarray) -> np.ndarray:
        r = np.abs(xs)
        out = np.zeros_like(r, dtype=float)
        inside = r <= self.s
        at0 = inside & (r == 0.0)
        pos = inside & ~at0
        rp = r[pos]
        with np.errstate(divide="ignore", over="ignore"):
            out[pos] = rp ** -self.alpha * (-np.log(rp)) ** -self.beta
        if self.alpha > 0:
            out[at0] = INF
        elif self.beta == 0:
            out[at0] = 1.0
        return out

    def lp_norm(self, p: float) -> float:
        _check_p(p)
        if p == INF:
            if self.alpha > 0:
                return INF
            if self.beta > 0:
                return (-math.log(self.s)) ** -self.beta
            return 1.0
        a, b = self.alpha * p, self.beta * p
        if a > 1.0 or (a == 1.0 and b <= 1.0):
            return INF
        if a == 1.0:
            # int_0^s x^-1 (log 1/x)^-b dx = (log 1/s)^(1-b) / (b-1)
            return (2.0 * math.log(1.0 / self.s) ** (1.0 - b) / (b - 1.0)) ** (1.0 / p)
        if b == 0.0:
            return (2.0 * self.s ** (1.0 - a) / (1.0 - a)) ** (1.0 / p)
        return (2.0 * _power_log_integral(a, b, self.s)) ** (1.0 / p)

    def support(self) -> tuple[tuple[float, float], ...]:
        return ((-self.s, self.s),)

    def to_dict(self) -> dict:
        return {"kind": "powerlog", "alpha": self.alpha, "beta": self.beta, "s": self.s}


@dataclass(frozen=True)
class PowerLogTail:
    """|x|^-alpha (log|x|)^-beta on |x| >= R with R >= 2."""

    alpha: float
    beta: float
    R: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if self.R < 2.0:
            raise ValueError(f"R must be >= 2, got {self.R}")

    def value(self, x: float) -> float:
        r = abs(x)
        if r < self.R:
            return 0.0
        return r ** -self.alpha * math.log(r) ** -self.beta

    def values(self, xs: np.ndarray) -> np.ndarray:
        r = np.abs(xs)
        out = np.zeros_like(r, dtype=float)
        m = r >= self.R
        rm = r[m]
        out[m] = rm ** -self.alpha * np.log(rm) ** -self.beta
        return out

    def lp_norm(self, p: float) -> float:
        _check_p(p)
        if p == INF:
            # decreasing in |x| on the tail, so the sup sits at |x| = R
            return self.R ** -self.alpha * math.log(self.R) ** -self.beta
        a, b = self.alpha * p, self.beta * p
        if a < 1.0 or (a == 1.0 and b <= 1.0):
            return INF
        if a == 1.0:
            return (2.0 * math.log(self.R) ** (1.0 - b) / (b - 1.0)) ** (1.0 / p)
        if b == 0.0:
            return (2.0 * self.R ** (1.0 - a) / (a - 1.0)) ** (1.0 / p)
        return (2.0 * _tail_integral(a, b, self.R)) ** (1.0 / p)

    def support(self) -> tuple[tuple[float, float], ...]:
        return ((-INF, -self.R), (self.R, INF))

    def to_dict(self) -> dict:
        return {"kind": "powerlogtail", "alpha": self.alpha, "beta": self.beta, "R": self.R}


@dataclass(frozen=True)
class Constant:
    """The constant function c >= 0."""

    c: float

    def __post_init__(self):
        if self.c < 0 or not math.isfinite(self.c):
            raise ValueError("c must be finite and >= 0")

    def value(self, x: float) -> float:
        return self.c

    def values(self, xs: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(xs, dtype=float), self.c)

    def lp_norm(self, p: float) -> float:
        _check_p(p)
        if self.c == 0.0:
            return 0.0
        return self.c if p == INF else INF

    def support(self) -> tuple[tuple[float, float], ...]:
        if self.c == 0.0:
            return ()
        return ((-INF, INF),)

    def to_dict(self) -> dict:
        return {"kind": "constant", "c": self.c}


FunctionSpec = Indicator | PowerLog | PowerLogTail | Constant

_KINDS = {
    "indicator": (Indicator, ("a", "b")),
    "powerlog": (PowerLog, ("alpha", "beta", "s")),
    "powerlogtail": (PowerLogTail, ("alpha", "beta", "R")),
    "constant": (Constant, ("c",)),
}


def to_json(f: FunctionSpec) -> str:
    return json.dumps(f.to_dict(), sort_keys=True)


def from_json(text: str | dict) -> FunctionSpec:
    d = json.loads(text) if isinstance(text, str) else dict(text)
    kind = d.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown function kind: {kind!r}")
    cls, fields = _KINDS[kind]
    missing = [k for k in fields if k not in d]
    if missing:
        raise ValueError(f"{kind} needs fields {fields}, missing {missing}")
    return cls(*(float(d[k]) for k in fields))


def _check_p(p: float) -> None:
    if p != INF and (not math.isfinite(p) or p < 1.0):
        raise ValueError(f"p must be in [1, inf], got {p}")


def _power_log_integral(a: float, b: float, s: float) -> float:
    """int_0^s x^-a (log 1/x)^-b dx for a < 1, by x = exp(-u).

    The substitution turns the graded endpoint at 0 into a smooth
    exponentially decaying integrand on [log(1/s), inf).
    """
    u0 = math.log(1.0 / s)
    val, _ = quad(lambda u: math.exp(-(1.0 - a) * u) * u ** -b, u0, math.inf, limit=200)
    return val


def _tail_integral(a: float, b: float, R: float) -> float:
    """int_R^inf x^-a (log x)^-b dx for a > 1, by x = exp(u)."""
    u0 = math.log(R)
    val, _ = quad(lambda u: math.exp((1.0 - a) * u) * u ** -b, u0, math.inf, limit=200)
    return val
