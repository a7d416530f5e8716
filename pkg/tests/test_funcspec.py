"""Exact evaluation, closed-form norms, and serialization of test functions."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremax._integrate import panel_integral
from spheremax.funcspec import (
    INF,
    Constant,
    Indicator,
    PowerLog,
    PowerLogTail,
    from_json,
    to_json,
)


class TestEval:
    def test_indicator_inside(self):
        assert Indicator(-1.0, 1.0).value(0.5) == 1.0

    def test_indicator_outside(self):
        assert Indicator(-1.0, 1.0).value(1.5) == 0.0

    def test_powerlog_quarter(self):
        # (1/4)^(-1/2) * (ln 4)^(-1) = 2 / ln 4
        f = PowerLog(0.5, 1.0, 0.5)
        assert f.value(0.25) == pytest.approx(2.0 / math.log(4.0), rel=1e-14)
        assert f.value(0.25) == pytest.approx(1.4426950408889634, abs=1e-15)

    def test_powerlog_outside_support(self):
        assert PowerLog(0.5, 1.0, 0.5).value(0.9) == 0.0

    def test_powerlog_singular_point_sentinel(self):
        assert PowerLog(0.5, 1.0, 0.5).value(0.0) == INF

    def test_powerlog_no_singularity_when_alpha_zero(self):
        f = PowerLog(0.0, 1.0, 0.5)
        assert f.value(0.0) == 0.0  # (-log|0|)^-1 -> 0 in the limit

    def test_tail(self):
        f = PowerLogTail(0.25, 0.5, 2.0)
        assert f.value(3.0) == pytest.approx(3.0**-0.25 * math.log(3.0) ** -0.5)
        assert f.value(1.5) == 0.0
        assert f.value(-3.0) == f.value(3.0)

    def test_constant(self):
        assert Constant(2.5).value(123.0) == 2.5

    def test_values_matches_value(self):
        f = PowerLog(0.3, 0.7, 0.5)
        xs = np.array([-0.6, -0.25, 0.1, 0.25, 0.49, 0.8])
        np.testing.assert_allclose(f.values(xs), [f.value(x) for x in xs])


class TestNorms:
    def test_indicator_norm(self):
        delta = 0.3
        f = Indicator(-delta, delta)
        for p in (1.0, 2.0, 3.5):
            assert f.lp_norm(p) == pytest.approx((2 * delta) ** (1 / p), rel=1e-14)
        assert f.lp_norm(math.inf) == 1.0

    def test_powerlog_borderline_closed_form(self):
        # alpha*p = 1, beta*p = 2: antiderivative of x^-1 (ln 1/x)^-2 is
        # (ln 1/x)^-1, giving norm^p = 2/ln 2
        for p in (2.0, 3.0):
            f = PowerLog(1 / p, 2 / p, 0.5)
            assert f.lp_norm(p) == pytest.approx((2.0 / math.log(2.0)) ** (1 / p),
                                                 rel=1e-12)
        assert PowerLog(1 / 3, 2 / 3, 0.5).lp_norm(3.0) == pytest.approx(
            1.4236443587288568, abs=1e-13)

    def test_powerlog_divergent(self):
        assert PowerLog(0.5, 0.5, 0.5).lp_norm(2.0) == INF

    def test_tail_divergent_and_finite(self):
        f = PowerLogTail(0.25, 0.5, 2.0)
        assert f.lp_norm(2.0) == INF  # x^-1/2 tail squared is x^-1 log^-1: diverges
        assert f.lp_norm(8.0) < INF

    def test_constant_norms(self):
        assert Constant(2.0).lp_norm(2.0) == INF
        assert Constant(0.0).lp_norm(2.0) == 0.0
        assert Constant(2.0).lp_norm(math.inf) == 2.0

    def test_numeric_matches_closed_form_indicator(self):
        f = Indicator(-0.7, 1.1)
        for p in (1.0, 2.0, 4.0):
            num = panel_integral(lambda u: f.values(u) ** p, -0.7, 1.1, panels=64)
            assert num ** (1 / p) == pytest.approx(f.lp_norm(p), rel=1e-6)

    def test_numeric_matches_closed_form_powerlog(self):
        # substitute w = ln(1/x): int_0^s x^-1 (ln 1/x)^-2 dx = int w^-2 dw,
        # integrated over geometric segments plus the exact 1/W tail
        p = 2.0
        f = PowerLog(1 / p, 2 / p, 0.5)
        lo, acc = math.log(2.0), 0.0
        while lo < 2.0**16:
            hi = min(lo * 4.0, 2.0**16)
            acc += panel_integral(lambda w: w**-2.0, lo, hi, panels=64)
            lo = hi
        num = 2.0 * (acc + 2.0**-16)
        assert num ** (1 / p) == pytest.approx(f.lp_norm(p), rel=1e-6)


class TestValidation:
    def test_indicator_needs_a_lt_b(self):
        with pytest.raises(ValueError):
            Indicator(1.0, 1.0)

    def test_powerlog_needs_s_below_one(self):
        with pytest.raises(ValueError):
            PowerLog(0.5, 1.0, 1.0)

    def test_powerlog_rejects_negative_exponents(self):
        with pytest.raises(ValueError):
            PowerLog(-0.1, 1.0, 0.5)
        with pytest.raises(ValueError):
            PowerLog(0.1, -1.0, 0.5)

    def test_tail_needs_R_at_least_two(self):
        with pytest.raises(ValueError):
            PowerLogTail(0.5, 1.0, 1.5)

    def test_constant_nonnegative(self):
        with pytest.raises(ValueError):
            Constant(-1.0)


class TestJson:
    @pytest.mark.parametrize("f", [
        Indicator(-1.5, 2.0),
        PowerLog(0.25, 0.75, 0.5),
        PowerLogTail(0.5, 1.0, 2.0),
        Constant(1.25),
    ])
    def test_round_trip(self, f):
        assert from_json(to_json(f)) == f

    def test_kind_tags(self):
        assert json.loads(to_json(Indicator(0.0, 1.0)))["kind"] == "indicator"
        assert json.loads(to_json(PowerLog(0.1, 0.2, 0.5)))["kind"] == "powerlog"
        assert json.loads(to_json(PowerLogTail(0.1, 0.2, 2.0)))["kind"] == "powerlogtail"
        assert json.loads(to_json(Constant(1.0)))["kind"] == "constant"

    def test_unknown_kind_rejected(self):
        with pytest.raises((KeyError, ValueError)):
            from_json('{"kind": "mystery", "c": 1}')


@st.composite
def funcspecs(draw):
    kind = draw(st.integers(0, 3))
    if kind == 0:
        a = draw(st.floats(-5, 4.9))
        w = draw(st.floats(0.01, 5))
        return Indicator(a, a + w)
    if kind == 1:
        return PowerLog(draw(st.floats(0, 2)), draw(st.floats(0, 2)),
                        draw(st.floats(0.05, 0.95)))
    if kind == 2:
        return PowerLogTail(draw(st.floats(0, 2)), draw(st.floats(0, 2)),
                            draw(st.floats(2, 10)))
    return Constant(draw(st.floats(0, 10)))


class TestProperties:
    @given(funcspecs(), st.floats(-20, 20))
    @settings(max_examples=200, deadline=None)
    def test_eval_nonnegative(self, f, x):
        assert f.value(x) >= 0.0

    @given(st.floats(-3, 3), st.floats(0.05, 4), st.floats(1, 8),
           st.sampled_from([0.5, 2.0]))
    @settings(max_examples=100, deadline=None)
    def test_indicator_dilation_covariance(self, a, w, p, lam):
        # x -> f(lam*x) has support [a/lam, b/lam], so the norm scales by
        # lam^(-1/p)
        f = Indicator(a, a + w)
        dilated = Indicator(a / lam, (a + w) / lam)
        assert dilated.lp_norm(p) == pytest.approx(
            lam ** (-1 / p) * f.lp_norm(p), rel=1e-12)

    @given(funcspecs())
    @settings(max_examples=100, deadline=None)
    def test_round_trip_property(self, f):
        assert from_json(to_json(f)) == f
