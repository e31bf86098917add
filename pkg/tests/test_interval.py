from __future__ import annotations

import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from powcomp.interval import (
    ComplexBox,
    Interval,
    interval_exp,
    interval_log,
    interval_pi,
    interval_sqrt,
    round_down,
    round_up,
)


fracs = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


@st.composite
def nested(draw):
    """(inner, outer, point) with point in inner and inner inside outer."""
    a, b = sorted((draw(fracs), draw(fracs)))
    x = draw(st.fractions(min_value=a, max_value=b, max_denominator=1000)) if a < b else a
    da = draw(st.fractions(min_value=0, max_value=5, max_denominator=100))
    db = draw(st.fractions(min_value=0, max_value=5, max_denominator=100))
    return Interval(a, b), Interval(a - da, b + db), x


def _ops(I, J):
    out = {"add": I + J, "sub": I - J, "mul": I * J, "sqr": I.sqr(), "abs": abs(I), "pow3": I**3}
    if not J.contains_zero():
        out["div"] = I / J
    return out


@settings(max_examples=1000, deadline=None)
@given(nested(), nested())
def test_inclusion_monotone_and_contains_points(p1, p2):
    I, I2, x = p1
    J, J2, y = p2
    inner, outer = _ops(I, J), _ops(I2, J2)
    points = {"add": x + y, "sub": x - y, "mul": x * y, "sqr": x * x, "abs": abs(x), "pow3": x**3}
    if y != 0:
        points["div"] = x / y
    for name, v in inner.items():
        assert v.contains(points[name]), name
        if name in outer:
            assert v.subset_of(outer[name]), name


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=-40, max_value=40, max_denominator=10**6))
@mpmath.workdps(60)
def test_exp_encloses_reference(x):
    e = interval_exp(x, 80)
    ref = mpmath.exp(mpmath.mpf(x.numerator) / x.denominator)
    assert mpmath.mpf(e.lo.numerator) / e.lo.denominator <= ref <= mpmath.mpf(e.hi.numerator) / e.hi.denominator
    assert e.width <= e.hi / 2**70


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=F(1, 10**6), max_value=10**6, max_denominator=10**6))
@mpmath.workdps(60)
def test_log_sqrt_enclose_reference(x):
    xm = mpmath.mpf(x.numerator) / x.denominator
    for iv, ref in ((interval_log(x, 80), mpmath.log(xm)), (interval_sqrt(x, 80), mpmath.sqrt(xm))):
        lo = mpmath.mpf(iv.lo.numerator) / iv.lo.denominator
        hi = mpmath.mpf(iv.hi.numerator) / iv.hi.denominator
        assert lo <= ref <= hi
        assert hi - lo <= abs(ref) * mpmath.mpf(2) ** -70 + mpmath.mpf(2) ** -78


@mpmath.workdps(60)
def test_trivial_values():
    e0 = interval_exp(0)
    assert e0.contains(1) and e0.width <= F(1, 2**80)
    assert interval_log(interval_exp(1)).contains(1)
    pi = interval_pi(100)
    assert F(314159265358979, 10**14) < pi.lo and pi.hi < F(314159265358980, 10**14)
    ref = mpmath.pi
    assert mpmath.mpf(pi.lo.numerator) / pi.lo.denominator <= ref <= mpmath.mpf(pi.hi.numerator) / pi.hi.denominator


def test_rounding_directions():
    x = F(1, 3)
    assert round_down(x, 20) <= x <= round_up(x, 20)
    assert round_up(x, 20) - round_down(x, 20) <= x / 2**18
    assert round_down(-x, 20) <= -x <= round_up(-x, 20)


def test_interval_validation_and_reciprocal():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ZeroDivisionError):
        Interval(-1, 1).reciprocal()
    assert (1 / Interval(2, 4)) == Interval(F(1, 4), F(1, 2))


def test_domain_errors():
    with pytest.raises(ValueError):
        interval_log(Interval(-1, 2))
    with pytest.raises(ValueError):
        interval_sqrt(Interval(-1, 2))


def test_complex_box_multiplication_contains_products():
    rng = random.Random(7)
    for _ in range(200):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        w = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        Z = ComplexBox(Interval(F(z.real)), Interval(F(z.imag))).inflate(F(1, 100))
        W = ComplexBox(Interval(F(w.real)), Interval(F(w.imag))).inflate(F(1, 100))
        zw = F(z.real) * F(w.real) - F(z.imag) * F(w.imag), F(z.real) * F(w.imag) + F(z.imag) * F(w.real)
        assert (Z * W).contains(zw)
        assert (Z * W).abs_sq().contains(zw[0] ** 2 + zw[1] ** 2)
