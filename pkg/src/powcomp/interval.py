"""Closed intervals with rational endpoints and certified elementary functions.

Field operations on intervals are exact.  Only the transcendental functions
(``exp``, ``log``, ``sqrt``, ``pi``) widen their result; they round outward to
dyadic rationals carrying a fixed number of significant bits, so the width of
a point evaluation is at most about ``2**-prec`` relative to its magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Union

__all__ = [
    "DEFAULT_PREC",
    "Interval",
    "ComplexBox",
    "interval_exp",
    "interval_log",
    "interval_sqrt",
    "interval_pi",
    "round_down",
    "round_up",
]

DEFAULT_PREC = 80
_GUARD = 24

Number = Union[int, Fraction]


def _ilog2(x: Fraction) -> int:
    """An integer ``e`` with ``2**(e-1) <= x < 2**(e+1)`` for positive ``x``."""
    return x.numerator.bit_length() - x.denominator.bit_length()


def _floor_scaled(x: Fraction, shift: int) -> int:
    """``floor(x * 2**shift)``."""
    if shift >= 0:
        return (x.numerator << shift) // x.denominator
    return x.numerator // (x.denominator << -shift)


def _dyadic(m: int, shift: int) -> Fraction:
    return Fraction(m, 1 << shift) if shift >= 0 else Fraction(m << -shift)


def round_down(x: Number, bits: int) -> Fraction:
    """Largest dyadic ``<= x`` with about ``bits`` significant bits."""
    x = Fraction(x)
    if x == 0:
        return x
    shift = bits - _ilog2(abs(x))
    if x.denominator & (x.denominator - 1) == 0 and x.denominator.bit_length() - 1 <= shift:
        return x
    return _dyadic(_floor_scaled(x, shift), shift)


def round_up(x: Number, bits: int) -> Fraction:
    """Smallest dyadic ``>= x`` with about ``bits`` significant bits."""
    return -round_down(-Fraction(x), bits)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with rational endpoints."""

    lo: Fraction
    hi: Fraction = None  # type: ignore[assignment]

    def __post_init__(self):
        lo = Fraction(self.lo)
        hi = lo if self.hi is None else Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def hull(cls, *values) -> "Interval":
        los, his = [], []
        for v in values:
            v = _as_interval(v)
            los.append(v.lo)
            his.append(v.hi)
        return cls(min(los), max(his))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def mag(self) -> Fraction:
        """Largest absolute value attained."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> Fraction:
        """Smallest absolute value attained."""
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = Fraction(x) if not isinstance(x, float) else Fraction(x)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def inflate(self, r: Number) -> "Interval":
        return Interval(self.lo - r, self.hi + r)

    def round_out(self, bits: int) -> "Interval":
        """Outward rounding of both endpoints to ``bits`` significant bits."""
        return Interval(round_down(self.lo, bits), round_up(self.hi, bits))

    def round_abs(self, bits: int) -> "Interval":
        """Outward rounding of both endpoints to multiples of ``2**-bits``."""
        lo = _dyadic(_floor_scaled(self.lo, bits), bits)
        hi = -_dyadic(_floor_scaled(-self.hi, bits), bits)
        return Interval(lo, hi)

    def split(self) -> tuple["Interval", "Interval"]:
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)

    def __add__(self, other) -> "Interval":
        o = _as_interval(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        o = _as_interval(other)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other) -> "Interval":
        return _as_interval(other) - self

    def __mul__(self, other) -> "Interval":
        if not isinstance(other, Interval):
            c = Fraction(other)
            return Interval(self.lo * c, self.hi * c) if c >= 0 else Interval(self.hi * c, self.lo * c)
        if self.lo >= 0 and other.lo >= 0:
            return Interval(self.lo * other.lo, self.hi * other.hi)
        p = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(p), max(p))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.contains_zero():
            raise ZeroDivisionError(f"interval {self} contains zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other) -> "Interval":
        if not isinstance(other, Interval):
            c = Fraction(other)
            if c == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / c)
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Interval":
        return _as_interval(other) * self.reciprocal()

    def sqr(self) -> "Interval":
        lo2, hi2 = self.lo * self.lo, self.hi * self.hi
        if self.contains_zero():
            return Interval(0, max(lo2, hi2))
        return Interval(min(lo2, hi2), max(lo2, hi2))

    def __pow__(self, k: int) -> "Interval":
        if k < 0:
            return self.reciprocal() ** (-k)
        if k == 0:
            return Interval(1)
        if k % 2 == 1 or self.lo >= 0:
            return Interval(self.lo**k, self.hi**k)
        if self.hi <= 0:
            return Interval(self.hi**k, self.lo**k)
        return Interval(0, self.mag**k)

    def __abs__(self) -> "Interval":
        return Interval(self.mig, self.mag)

    def exp(self, prec: int = DEFAULT_PREC) -> "Interval":
        return interval_exp(self, prec)

    def log(self, prec: int = DEFAULT_PREC) -> "Interval":
        return interval_log(self, prec)

    def sqrt(self, prec: int = DEFAULT_PREC) -> "Interval":
        return interval_sqrt(self, prec)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"


def _as_interval(v) -> Interval:
    return v if isinstance(v, Interval) else Interval(Fraction(v))


@dataclass(frozen=True)
class ComplexBox:
    """Axis-parallel rectangle ``re + i*im`` in the complex plane."""

    re: Interval
    im: Interval

    def __post_init__(self):
        object.__setattr__(self, "re", _as_interval(self.re))
        object.__setattr__(self, "im", _as_interval(self.im))

    def __add__(self, other) -> "ComplexBox":
        o = _as_box(other)
        return ComplexBox(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "ComplexBox":
        return ComplexBox(-self.re, -self.im)

    def __sub__(self, other) -> "ComplexBox":
        return self + (-_as_box(other))

    def __mul__(self, other) -> "ComplexBox":
        if not isinstance(other, ComplexBox):
            return ComplexBox(self.re * other, self.im * other)
        return ComplexBox(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains(self, z) -> bool:
        """``z`` may be a box, an exact ``(re, im)`` pair or a complex number."""
        if isinstance(z, ComplexBox):
            return self.re.contains(z.re) and self.im.contains(z.im)
        if isinstance(z, tuple):
            return self.re.contains(z[0]) and self.im.contains(z[1])
        z = complex(z)
        return self.re.contains(Fraction(z.real)) and self.im.contains(Fraction(z.imag))

    def inflate(self, r: Number) -> "ComplexBox":
        return ComplexBox(self.re.inflate(r), self.im.inflate(r))

    def abs_sq(self) -> Interval:
        return self.re.sqr() + self.im.sqr()

    def abs(self, prec: int = DEFAULT_PREC) -> Interval:
        """Enclosure of ``|z|`` over the box."""
        return interval_sqrt(self.abs_sq(), prec)

    def __repr__(self) -> str:
        return f"ComplexBox({self.re!r}, {self.im!r})"


def _as_box(v) -> ComplexBox:
    if isinstance(v, ComplexBox):
        return v
    if isinstance(v, complex):
        return ComplexBox(Interval(Fraction(v.real)), Interval(Fraction(v.imag)))
    return ComplexBox(_as_interval(v), Interval(0))


# --- elementary functions -------------------------------------------------


def _exp_dyadic(y: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Bounds ``lo <= exp(y) <= hi`` for rational ``y``."""
    if y == 0:
        return Fraction(1), Fraction(1)
    k = 0
    z = y
    while abs(z) > Fraction(1, 2):
        z /= 2
        k += 1
    W = bits + k + _GUARD
    s = Fraction(1)
    term = Fraction(1)
    n = 0
    tol = Fraction(1, 1 << W)
    while True:
        n += 1
        term = term * z / n
        s += term
        # |remainder| <= |z|^(n+1)/(n+1)! * 1/(1-|z|)
        rem = 2 * abs(term) * abs(z) / (n + 1)
        if rem < tol:
            break
    lo = round_down(s - rem, W)
    hi = round_up(s + rem, W)
    for _ in range(k):
        lo = round_down(lo * lo, W)
        hi = round_up(hi * hi, W)
    return lo, hi


def interval_exp(x, prec: int = DEFAULT_PREC) -> Interval:
    """Certified enclosure of ``exp`` over an interval (or a rational point)."""
    x = _as_interval(x)
    bits = prec + 8
    lo_in = round_down(x.lo, bits + max(0, _ilog2(abs(x.lo)) if x.lo else 0))
    hi_in = round_up(x.hi, bits + max(0, _ilog2(abs(x.hi)) if x.hi else 0))
    lo, _ = _exp_dyadic(lo_in, bits)
    _, hi = _exp_dyadic(hi_in, bits)
    return Interval(lo, hi)


def _atanh_bounds(t: Fraction, W: int) -> tuple[Fraction, Fraction]:
    """``atanh(t)`` for ``0 <= t <= 1/3`` as an enclosing pair."""
    if t == 0:
        return Fraction(0), Fraction(0)
    t2 = t * t
    power = t
    s = Fraction(0)
    j = 0
    tol = Fraction(1, 1 << W)
    while True:
        s += power / (2 * j + 1)
        power = power * t2
        j += 1
        rem = power / ((2 * j + 1) * (1 - t2))
        if rem < tol:
            break
    return round_down(s, W), round_up(s + rem, W)


@lru_cache(maxsize=None)
def _log2_bounds(W: int) -> tuple[Fraction, Fraction]:
    lo, hi = _atanh_bounds(Fraction(1, 3), W)
    return 2 * lo, 2 * hi


def _log_point(x: Fraction, W: int) -> tuple[Fraction, Fraction]:
    if x <= 0:
        raise ValueError("log of a non-positive number")
    k = _ilog2(x)
    m = x / Fraction(2) ** k if k >= 0 else x * (1 << -k)
    while m >= 2:
        m /= 2
        k += 1
    while m < 1:
        m *= 2
        k -= 1
    # m in [1, 2), so t = (m-1)/(m+1) in [0, 1/3)
    t = (m - 1) / (m + 1)
    alo, ahi = _atanh_bounds(t, W)
    l2lo, l2hi = _log2_bounds(W)
    if k >= 0:
        return k * l2lo + 2 * alo, k * l2hi + 2 * ahi
    return k * l2hi + 2 * alo, k * l2lo + 2 * ahi


def interval_log(x, prec: int = DEFAULT_PREC) -> Interval:
    """Certified enclosure of the natural logarithm; requires ``lo > 0``."""
    x = _as_interval(x)
    if x.lo <= 0:
        raise ValueError(f"log requires a positive interval, got {x}")
    W = prec + _GUARD
    lo, _ = _log_point(round_down(x.lo, W), W)
    _, hi = _log_point(round_up(x.hi, W), W)
    return Interval(round_down(lo, W), round_up(hi, W))


def _sqrt_point(x: Fraction, W: int) -> tuple[Fraction, Fraction]:
    if x < 0:
        raise ValueError("sqrt of a negative number")
    if x == 0:
        return Fraction(0), Fraction(0)
    s = W - _ilog2(x) // 2
    n = _floor_scaled(x, 2 * s)
    r = isqrt(n)
    lo = _dyadic(r, s)
    if r * r == n and _dyadic(n, 2 * s) == x:
        return lo, lo
    return lo, _dyadic(r + 1, s)


def interval_sqrt(x, prec: int = DEFAULT_PREC) -> Interval:
    """Certified enclosure of the square root; requires ``lo >= 0``."""
    x = _as_interval(x)
    if x.lo < 0:
        raise ValueError(f"sqrt requires a non-negative interval, got {x}")
    W = prec + 4
    lo, _ = _sqrt_point(x.lo, W)
    _, hi = _sqrt_point(x.hi, W)
    return Interval(lo, hi)


def _atan_inv_bounds(k: int, W: int) -> tuple[Fraction, Fraction]:
    """``atan(1/k)`` bracketed by consecutive partial sums of its alternating series."""
    tol = Fraction(1, 1 << W)
    x = Fraction(1, k)
    x2 = x * x
    power = x
    s = Fraction(0)
    j = 0
    while True:
        term = power / (2 * j + 1)
        prev = s
        s = s + term if j % 2 == 0 else s - term
        if term < tol:
            break
        power *= x2
        j += 1
    return (min(prev, s), max(prev, s))


@lru_cache(maxsize=None)
def interval_pi(prec: int = DEFAULT_PREC) -> Interval:
    """Enclosure of pi from Machin's formula ``16 atan(1/5) - 4 atan(1/239)``."""
    W = prec + 8
    a_lo, a_hi = _atan_inv_bounds(5, W)
    b_lo, b_hi = _atan_inv_bounds(239, W)
    return Interval(round_down(16 * a_lo - 4 * b_hi, W), round_up(16 * a_hi - 4 * b_lo, W))
