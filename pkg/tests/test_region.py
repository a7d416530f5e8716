"""Exact rational classification of exponent tuples and region geometry."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremax.region import (
    ExponentPoint,
    Verdict,
    check_conditions,
    classify,
    region_figure,
    sample_region,
)

F = Fraction


def pt(*q):
    return ExponentPoint(tuple(F(v) for v in q))


class TestGoldenVerdicts:
    def test_bilinear_interior(self):
        assert classify(pt("1/3", "1/3")).verdict == Verdict.StrongBounded

    def test_bilinear_endpoint_segment(self):
        assert classify(pt("1/2", "1/4")).verdict == Verdict.NotEvenWeak

    def test_trilinear_corner(self):
        assert classify(pt(1, 0, 0)).verdict == Verdict.WeakOnly

    def test_trilinear_boundary_face(self):
        c = classify(pt("1/2", "1/2", 1))
        assert c.verdict == Verdict.StrongFailsWeakOpen
        assert c.in_H
        assert c.in_H_i[0]

    def test_trilinear_unbounded(self):
        assert classify(pt("3/5", "3/5", "9/10")).verdict == Verdict.Unbounded


class TestTriggers:
    def test_interior_point_triggers(self):
        rep = check_conditions(pt("1/3", "1/3", "1/3"))
        tags = rep.tags()
        assert "a_strict" in tags
        for i in (1, 2, 3):
            assert f"b_strict({i})" in tags
        assert "c_corner" not in tags

    def test_corner_triggers(self):
        tags = check_conditions(pt(1, 0, 0)).tags()
        assert "a_strict" in tags
        assert all(f"b_strict({i})" in tags for i in (1, 2, 3))
        assert "c_corner" in tags

    def test_boundary_equalities(self):
        rep = check_conditions(pt("1/2", "1/2", 1))
        tags = rep.tags()
        assert "a_equal" in tags
        assert "b_equal(1)" in tags
        assert rep.in_H
        assert rep.in_H_i[0]
        assert not rep.in_H_i[2]

    def test_exactness_rejects_floats(self):
        with pytest.raises(TypeError):
            ExponentPoint((0.5, 0.5))

    def test_range_validation(self):
        with pytest.raises(ValueError):
            pt("3/2", 0)
        with pytest.raises(ValueError):
            ExponentPoint((F(1, 2),))


class TestFigureGeometry:
    def test_m2_square_vertices(self):
        fig = region_figure(2)
        assert fig.vertices == (
            (F(0), F(0)), (F(1, 2), F(0)), (F(1, 2), F(1, 2)), (F(0), F(1, 2)),
        )

    def test_m2_H_single_point(self):
        fig = region_figure(2)
        assert fig.H == ((F(1, 2), F(1, 2)),)

    def test_m3_labeled_permutations(self):
        fig = region_figure(3)
        labeled = {
            (F(1), F(1, 2), F(0)), (F(1, 2), F(1), F(0)), (F(0), F(1), F(1, 2)),
            (F(0), F(1, 2), F(1)), (F(1, 2), F(0), F(1)), (F(1), F(0), F(1, 2)),
        }
        assert labeled <= set(fig.vertices)
        assert {p for p, _ in fig.labels} == labeled

    def test_m3_polytope_combinatorics(self):
        fig = region_figure(3)
        assert len(fig.vertices) == 13
        assert len(fig.faces) == 10
        edges = set()
        for face in fig.faces:
            idx = face.indices
            for a, b in zip(idx, idx[1:] + idx[:1]):
                edges.add(frozenset((a, b)))
        # Euler characteristic of a convex polytope surface
        assert len(fig.vertices) - len(edges) + len(fig.faces) == 2

    def test_m3_face_tags(self):
        fig = region_figure(3)
        tags = sorted(f.tag for f in fig.faces)
        assert tags.count("H") == 1
        assert sum(t.startswith("H_") for t in tags) == 3

    def test_m3_slice_pentagon(self):
        fig = region_figure(3, slice_value=F(1, 2))
        assert fig.slice_value == F(1, 2)
        assert len(fig.slice_polygon) == 5

    def test_unsupported_m(self):
        with pytest.raises(ValueError):
            region_figure(4)


class TestSampleRegion:
    def test_strong_samples_strict(self):
        for p, c in sample_region(3, 300, seed=3):
            if c.verdict == Verdict.StrongBounded:
                tags = check_conditions(p).tags()
                assert "a_strict" in tags
                assert all(f"b_strict({i})" in tags for i in (1, 2, 3))
                assert not c.in_H

    def test_m2_strong_fraction_near_quarter(self):
        rows = sample_region(2, 4000, seed=9)
        frac = sum(c.verdict == Verdict.StrongBounded for _, c in rows) / len(rows)
        assert frac == pytest.approx(0.25, abs=0.03)


class TestLattice:
    def test_m2_strong_region_exact_on_lattice(self):
        n = 200
        half = F(1, 2)
        for i in range(n):
            for j in range(n):
                q = (F(i, n), F(j, n))
                verdict = classify(ExponentPoint(q)).verdict
                expected = q[0] < half and q[1] < half
                assert (verdict == Verdict.StrongBounded) == expected, q


q_fracs = st.fractions(min_value=0, max_value=1, max_denominator=32)


class TestProperties:
    @given(st.lists(q_fracs, min_size=2, max_size=4))
    @settings(max_examples=300, deadline=None)
    def test_permutation_invariance(self, q):
        base = classify(ExponentPoint(tuple(q))).verdict
        rotated = classify(ExponentPoint(tuple(q[1:] + q[:1]))).verdict
        assert base == rotated

    @given(st.lists(q_fracs, min_size=2, max_size=3), st.integers(0, 2),
           st.fractions(min_value=0, max_value=1, max_denominator=16))
    @settings(max_examples=300, deadline=None)
    def test_coordinatewise_monotone(self, q, idx, smaller):
        pt0 = ExponentPoint(tuple(q))
        if classify(pt0).verdict != Verdict.StrongBounded:
            return
        idx %= len(q)
        if smaller > q[idx]:
            return
        q2 = list(q)
        q2[idx] = smaller
        c = classify(ExponentPoint(tuple(q2)))
        # shrinking a coordinate can only re-enter failure at a lattice corner
        assert c.verdict in (Verdict.StrongBounded, Verdict.WeakOnly)
        if c.verdict == Verdict.WeakOnly:
            assert "c_corner" in check_conditions(ExponentPoint(tuple(q2))).tags()

    @given(st.lists(q_fracs, min_size=2, max_size=4))
    @settings(max_examples=300, deadline=None)
    def test_equalities_never_strong_or_weakonly(self, q):
        p = ExponentPoint(tuple(q))
        tags = check_conditions(p).tags()
        if "a_equal" in tags or any(t.startswith("b_equal") for t in tags):
            assert classify(p).verdict not in (Verdict.StrongBounded,
                                               Verdict.WeakOnly)

    @given(st.lists(q_fracs, min_size=2, max_size=4))
    @settings(max_examples=200, deadline=None)
    def test_strong_never_in_H(self, q):
        p = ExponentPoint(tuple(q))
        c = classify(p)
        if c.verdict == Verdict.StrongBounded:
            assert not c.in_H and not any(c.in_H_i)
