"""Exact-rational classification of exponent tuples and region geometry.

Every comparison is done in Fraction arithmetic: the verdict changes on
measure-zero sets (equalities in the defining conditions), so floating
point is never allowed near a boundary.

Conditions on q = (1/p_1, ..., 1/p_m) in [0,1]^m:
  (a) sum q_i < m - 1
  (b) sum_{j != i} q_j < m - 3/2 for every i
  (c) q is not a nonzero lattice corner of {0,1}^m
Boundary sets:
  H   = {sum q_i = m - 1, every partial sum <= m - 3/2}
  H_i = {sum_{j != i} q_j = m - 3/2, sum q_i <= m - 1}
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product


class Verdict(str, Enum):
    StrongBounded = "StrongBounded"
    WeakOnly = "WeakOnly"
    StrongFailsWeakOpen = "StrongFailsWeakOpen"
    NotEvenWeak = "NotEvenWeak"
    Unbounded = "Unbounded"


HALF = Fraction(1, 2)
ONE = Fraction(1)
ZERO = Fraction(0)


def _as_fraction(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError(f"exponents must be exact rationals, got float {v!r}")
    return Fraction(v)


@dataclass(frozen=True)
class ExponentPoint:
    """q = (1/p_1, ..., 1/p_m) with exact rational entries in [0, 1]."""

    q: tuple[Fraction, ...]

    def __init__(self, q):
        qs = tuple(_as_fraction(v) for v in q)
        if len(qs) < 2:
            raise ValueError("need m >= 2 exponents")
        for v in qs:
            if not ZERO <= v <= ONE:
                raise ValueError(f"each q_i must lie in [0, 1], got {v}")
        object.__setattr__(self, "q", qs)

    @property
    def m(self) -> int:
        return len(self.q)

    @property
    def recip_p(self) -> Fraction:
        return sum(self.q, ZERO)

    def __repr__(self) -> str:
        return f"ExponentPoint(({', '.join(str(v) for v in self.q)}))"


@dataclass(frozen=True)
class ConditionReport:
    """Exact status of conditions (a), (b), (c) and boundary membership."""

    a: str                      # "strict" | "equal" | "violated"
    b: tuple[str, ...]          # per omitted index i
    c_corner: bool
    in_H: bool
    in_H_i: tuple[bool, ...]

    def tags(self) -> tuple[str, ...]:
        out = [f"a_{self.a}"]
        out += [f"b_{s}({i + 1})" for i, s in enumerate(self.b)]
        if self.c_corner:
            out.append("c_corner")
        return tuple(out)


def check_conditions(pt: ExponentPoint) -> ConditionReport:
    m = pt.m
    total = pt.recip_p
    a_bound = Fraction(m - 1)
    b_bound = Fraction(2 * m - 3, 2)

    def status(value, bound) -> str:
        if value < bound:
            return "strict"
        return "equal" if value == bound else "violated"

    a = status(total, a_bound)
    partials = [total - qi for qi in pt.q]
    b = tuple(status(p, b_bound) for p in partials)
    c_corner = all(v in (ZERO, ONE) for v in pt.q) and any(v == ONE for v in pt.q)
    in_h = total == a_bound and all(p <= b_bound for p in partials)
    in_h_i = tuple(p == b_bound and total <= a_bound for p in partials)
    return ConditionReport(a=a, b=b, c_corner=c_corner, in_H=in_h, in_H_i=in_h_i)


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    triggers: tuple[str, ...]
    in_H: bool
    in_H_i: tuple[bool, ...]
    citation: str

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "triggers": list(self.triggers),
            "in_H": self.in_H,
            "in_H_i": list(self.in_H_i),
            "citation": self.citation,
        }


def classify(pt: ExponentPoint) -> Classification:
    """Apply the precedence table to the exact condition triggers.

    Precedence: violated (a)/(b) -> Unbounded; the bilinear segment
    max(q) = 1/2 -> NotEvenWeak; any equality -> StrongFailsWeakOpen;
    nonzero lattice corner -> WeakOnly; otherwise StrongBounded.
    """
    rep = check_conditions(pt)
    m = pt.m

    def done(verdict: Verdict, citation: str) -> Classification:
        return Classification(
            verdict=verdict,
            triggers=rep.tags(),
            in_H=rep.in_H,
            in_H_i=rep.in_H_i,
            citation=citation,
        )

    if rep.a == "violated":
        return done(
            Verdict.Unbounded,
            "dilated-indicator family: sum q_i > m-1, no weak-type bound for any constant",
        )
    bad = [i + 1 for i, s in enumerate(rep.b) if s == "violated"]
    if bad:
        return done(
            Verdict.Unbounded,
            f"tangent-sphere family at i={bad[0]}: partial sum > m-3/2, "
            "no weak-type bound for any constant",
        )
    if m == 2 and max(pt.q) == HALF:
        return done(
            Verdict.NotEvenWeak,
            "bilinear endpoint q_i = 1/2: log-divergent truncations defeat "
            "weak-type for every partner exponent",
        )
    if rep.a == "equal" or any(s == "equal" for s in rep.b):
        return done(
            Verdict.StrongFailsWeakOpen,
            "equality in (a) or (b): power-log inputs defeat strong bounds; "
            "weak-type on H and H_i is open",
        )
    if rep.c_corner:
        return done(
            Verdict.WeakOnly,
            "nonzero lattice corner of {0,1}^m: weak-type bound holds, "
            "strong bound fails at the L^1 endpoints",
        )
    if m == 2:
        return done(
            Verdict.StrongBounded,
            "q_1, q_2 < 1/2 (both p_i > 2): strong bilinear bound",
        )
    return done(
        Verdict.StrongBounded,
        "strict (a), (b) and non-corner (c): interior of the strong-type region",
    )


# ---------------------------------------------------------------------------
# region geometry


@dataclass(frozen=True)
class Face:
    indices: tuple[int, ...]
    tag: str


@dataclass(frozen=True)
class RegionFigure:
    """Exact geometry of the closed boundedness region and its boundary sets."""

    m: int
    vertices: tuple[tuple[Fraction, ...], ...]
    faces: tuple[Face, ...]
    H: tuple[tuple[Fraction, ...], ...]
    H_i: tuple[tuple[tuple[Fraction, ...], ...], ...]
    cube: tuple[tuple[Fraction, ...], ...]
    labels: tuple[tuple[tuple[Fraction, ...], str], ...]
    slice_value: Fraction | None
    slice_polygon: tuple[tuple[Fraction, Fraction], ...] | None

    def to_dict(self) -> dict:
        def pt(p):
            return [str(c) for c in p]

        return {
            "m": self.m,
            "vertices": [pt(p) for p in self.vertices],
            "faces": [{"indices": list(f.indices), "tag": f.tag} for f in self.faces],
            "H": [pt(p) for p in self.H],
            "H_i": [[pt(p) for p in seg] for seg in self.H_i],
            "cube": [pt(p) for p in self.cube],
            "labels": [{"point": pt(p), "text": s} for p, s in self.labels],
            "slice_value": None if self.slice_value is None else str(self.slice_value),
            "slice_polygon": None
            if self.slice_polygon is None
            else [pt(p) for p in self.slice_polygon],
        }


def _label(p) -> str:
    return "(" + ",".join(str(c) for c in p) + ")"


def _order_face(vertices, indices) -> tuple[int, ...]:
    # orient each convex facet by angle around its centroid (rendering order
    # only; coordinates stay exact)
    pts = [tuple(float(c) for c in vertices[i]) for i in indices]
    n = len(pts[0])
    cx = [sum(p[k] for p in pts) / len(pts) for k in range(n)]
    if n == 2:
        ang = [math.atan2(p[1] - cx[1], p[0] - cx[0]) for p in pts]
        return tuple(i for _, i in sorted(zip(ang, indices)))
    import numpy as np

    arr = np.array(pts) - np.array(cx)
    # basis of the facet plane from the two largest principal directions
    _, _, vt = np.linalg.svd(arr, full_matrices=False)
    uu = arr @ vt[0]
    vv = arr @ vt[1]
    ang = np.arctan2(vv, uu)
    return tuple(i for _, i in sorted(zip(ang.tolist(), indices)))


def _in_closure(p, m: int) -> bool:
    total = sum(p, ZERO)
    if total > Fraction(m - 1):
        return False
    b_bound = Fraction(2 * m - 3, 2)
    return all(total - v <= b_bound for v in p)


def _clip_polygon(poly, a, b, rhs):
    """Sutherland-Hodgman in exact arithmetic: keep a*x + b*y <= rhs."""
    out = []
    n = len(poly)
    for k in range(n):
        p, r = poly[k], poly[(k + 1) % n]
        sp = a * p[0] + b * p[1] - rhs
        sr = a * r[0] + b * r[1] - rhs
        if sp <= 0:
            out.append(p)
        if (sp < 0 < sr) or (sr < 0 < sp):
            t = sp / (sp - sr)
            out.append((p[0] + t * (r[0] - p[0]), p[1] + t * (r[1] - p[1])))
    return out


def region_figure(m: int, slice_value=None) -> RegionFigure:
    """Exact vertices and facets of the closed region, plus H, H_i and cube.

    For m=3 an optional rational slice_value fixes q_3 and adds the exact
    2D cross-section polygon.
    """
    if m == 2:
        verts = (
            (ZERO, ZERO),
            (HALF, ZERO),
            (HALF, HALF),
            (ZERO, HALF),
        )
        faces = (Face(indices=(0, 1, 2, 3), tag="strong_closure"),)
        h = ((HALF, HALF),)
        h_i = (
            ((ZERO, HALF), (HALF, HALF)),   # i=1: q_2 = 1/2
            ((HALF, ZERO), (HALF, HALF)),   # i=2: q_1 = 1/2
        )
        cube = tuple(tuple(Fraction(c) for c in p) for p in product((0, 1), repeat=2))
        labels = tuple((v, _label(v)) for v in verts)
        if slice_value is not None:
            raise ValueError("slice_value only applies to m=3")
        return RegionFigure(
            m=2, vertices=verts, faces=faces, H=h, H_i=h_i, cube=cube,
            labels=labels, slice_value=None, slice_polygon=None,
        )
    if m != 3:
        raise ValueError(f"region_figure supports m in {{2, 3}}, got {m}")

    # vertices of {q in [0,1]^3 : sum <= 2, partial sums <= 3/2}
    candidates = set()
    candidates.add((ZERO, ZERO, ZERO))
    for perm in {(1, 0, 0), (0, 1, 0), (0, 0, 1)}:
        candidates.add(tuple(Fraction(c) for c in perm))
    from itertools import permutations

    for vals in (
        (ONE, HALF, ZERO),
        (ONE, HALF, HALF),
    ):
        for perm in set(permutations(vals)):
            candidates.add(perm)
    verts = tuple(sorted(p for p in candidates if _in_closure(p, 3)))
    index = {p: i for i, p in enumerate(verts)}

    faces = []
    for axis in range(3):
        for val, side in ((ZERO, "0"), (ONE, "1")):
            idx = [index[p] for p in verts if p[axis] == val]
            faces.append(Face(indices=_order_face(verts, idx), tag=f"q{axis + 1}={side}"))
    idx = [index[p] for p in verts if sum(p, ZERO) == Fraction(2)]
    faces.append(Face(indices=_order_face(verts, idx), tag="H"))
    h = tuple(verts[i] for i in faces[-1].indices)
    h_i = []
    for i in range(3):
        idx = [
            index[p]
            for p in verts
            if sum(p, ZERO) - p[i] == Fraction(3, 2)
        ]
        faces.append(Face(indices=_order_face(verts, idx), tag=f"H_{i + 1}"))
        h_i.append(tuple(verts[j] for j in faces[-1].indices))

    cube = tuple(tuple(Fraction(c) for c in p) for p in product((0, 1), repeat=3))
    labeled = tuple(
        (p, _label(p))
        for p in verts
        if sorted(p) == [ZERO, HALF, ONE]
    )

    sl_val = None
    sl_poly = None
    if slice_value is not None:
        sl_val = _as_fraction(slice_value)
        if not ZERO <= sl_val <= ONE:
            raise ValueError(f"slice_value must lie in [0, 1], got {sl_val}")
        poly = [(ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE)]
        # sum <= 2; partial sums <= 3/2 with q_3 fixed
        for a, b, rhs in (
            (ONE, ONE, Fraction(2) - sl_val),
            (ONE, ONE, Fraction(3, 2)),
            (ONE, ZERO, Fraction(3, 2) - sl_val),
            (ZERO, ONE, Fraction(3, 2) - sl_val),
        ):
            poly = _clip_polygon(poly, a, b, rhs)
            if not poly:
                break
        sl_poly = tuple(poly)

    return RegionFigure(
        m=3, vertices=verts, faces=tuple(faces), H=h, H_i=tuple(h_i),
        cube=cube, labels=labeled, slice_value=sl_val, slice_polygon=sl_poly,
    )


def sample_region(m: int, count: int, seed: int, denominator: int = 256):
    """Seeded lattice samples of [0,1]^m with their classifications."""
    if count < 1:
        raise ValueError("count must be >= 1")
    import numpy as np

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        ks = rng.integers(0, denominator + 1, size=m)
        pt = ExponentPoint(tuple(Fraction(int(k), denominator) for k in ks))
        out.append((pt, classify(pt)))
    return out
