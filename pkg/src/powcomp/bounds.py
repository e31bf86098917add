"""Certified upper bounds for the coefficients and tails of ``T`` and ``S``.

Each term of the permutation expansion of ``det(I - M(x))`` in degree ``n``
comes from a set of distinct row indices summing to ``n``, and its size is at
most ``1 / prod (b sigma(i) - i)!``.  Convexity of ``a (log a - 1)`` bounds
that product from below, which gives

* the refined bound ``sum_h h! p(n, h) (e h / ((b-1) n))^((b-1) n)``, where
  ``p(n, h)`` counts partitions of ``n`` into ``h`` distinct parts, and
* the closed-form bound ``exp(-(b-1)/2 n log n - c n + n g(n))`` with
  ``g(n) = (sqrt(n/2) log n + sqrt(n) + 3) / n``.

Terms of ``S`` whose first index is 1 are terms of ``T`` of one degree higher,
scaled by at most ``(b-1)!``.

All functions return :class:`~powcomp.interval.Interval` enclosures of the
bound value; only the upper endpoint matters for soundness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import TailBoundError
from .interval import (
    DEFAULT_PREC,
    Interval,
    interval_exp,
    interval_log,
    interval_pi,
    interval_sqrt,
)

__all__ = [
    "BoundParams",
    "partitions_distinct",
    "distinct_partition_counts",
    "robbins_bound",
    "bound_constant_c",
    "g_explicit",
    "coeff_bound_explicit",
    "coeff_bound_refined",
    "tail_ratio",
    "tail_bound",
    "best_tail_bound",
]

WHICH = ("T", "S")


@lru_cache(maxsize=None)
def distinct_partition_counts(n: int) -> tuple[int, ...]:
    """``counts[h]`` = number of partitions of ``n`` into exactly ``h`` distinct parts."""
    if n < 0:
        raise ValueError("n must be non-negative")
    # p(n, h) = p(n - h, h) + p(n - h, h - 1): subtract one from every part
    hmax = 0
    while (hmax + 1) * (hmax + 2) // 2 <= n:
        hmax += 1
    table = [[0] * (hmax + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for k in range(1, n + 1):
        for h in range(1, hmax + 1):
            if k >= h:
                table[k][h] = table[k - h][h] + table[k - h][h - 1]
    return tuple(table[n])


def partitions_distinct(n: int) -> int:
    """Number of partitions of ``n`` into distinct parts."""
    if n < 0:
        raise ValueError("n must be non-negative")
    # independent of distinct_partition_counts: the product prod (1 + x^k)
    coeffs = [1] + [0] * n
    for k in range(1, n + 1):
        for j in range(n, k - 1, -1):
            coeffs[j] += coeffs[j - k]
    return coeffs[n]


def robbins_bound(n: int, prec: int = DEFAULT_PREC) -> Interval:
    """``pi / sqrt(12 n) * exp(pi sqrt(n) / sqrt(3) + pi^2 / 12)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    pi = interval_pi(prec)
    arg = pi * interval_sqrt(Fraction(n, 3), prec) + pi.sqr() / 12
    return pi / interval_sqrt(12 * n, prec) * interval_exp(arg, prec)


def _check(b: int, which: str) -> None:
    if b < 2:
        raise ValueError("base must be at least 2")
    if which not in WHICH:
        raise ValueError(f"which must be one of {WHICH}, got {which!r}")


@lru_cache(maxsize=None)
def bound_constant_c(b: int, prec: int = DEFAULT_PREC) -> Interval:
    """``c = (b-1)(log((b-1)/sqrt 2) - 1)``."""
    log_half_2 = interval_log(2, prec) / 2
    return (b - 1) * (interval_log(b - 1, prec) - log_half_2 - 1)


@lru_cache(maxsize=None)
def g_explicit(n: int, prec: int = DEFAULT_PREC) -> Interval:
    """``g(n) = (sqrt(n/2) log n + sqrt(n) + 3) / n``, decreasing for ``n >= 2``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    num = interval_sqrt(Fraction(n, 2), prec) * interval_log(n, prec) + interval_sqrt(n, prec) + 3
    return num / n


@dataclass(frozen=True)
class BoundParams:
    b: int
    prec: int = DEFAULT_PREC

    @property
    def c(self) -> Interval:
        return bound_constant_c(self.b, self.prec)

    def g(self, n: int) -> Interval:
        return g_explicit(n, self.prec)


def _explicit_exponent(b: int, n: int, extra: int, prec: int) -> Interval:
    c = bound_constant_c(b, prec)
    return (
        -Fraction(b - 1, 2) * n * interval_log(n, prec)
        - c * n
        + (n + extra) * g_explicit(n, prec)
    )


@lru_cache(maxsize=None)
def coeff_bound_explicit(b: int, n: int, which: str = "T", prec: int = DEFAULT_PREC) -> Interval:
    """Closed-form bound on ``|t_n|`` (or ``|s_n|`` with ``which="S"``), valid for ``n >= 1``."""
    _check(b, which)
    if n < 1:
        raise ValueError("n must be at least 1")
    if which == "T":
        return interval_exp(_explicit_exponent(b, n, 0, prec), prec).round_out(prec)
    return ((factorial(b - 1) + 1) * interval_exp(_explicit_exponent(b, n, 1, prec), prec)).round_out(prec)


@lru_cache(maxsize=None)
def _refined_T(b: int, n: int, prec: int) -> Interval:
    if n == 0:
        return Interval(1)
    a = (b - 1) * n
    counts = distinct_partition_counts(n)
    total = Fraction(0)
    for h, cnt in enumerate(counts):
        if h and cnt:
            total += factorial(h) * cnt * Fraction(h, a) ** a
    return (interval_exp(a, prec) * total).round_out(prec)


def coeff_bound_refined(b: int, n: int, which: str = "T", prec: int = DEFAULT_PREC) -> Interval:
    """Bound on ``|t_n|`` from exact distinct-partition counts (``which="S"`` for ``|s_n|``)."""
    _check(b, which)
    if n < 0:
        raise ValueError("n must be non-negative")
    if which == "T":
        return _refined_T(b, n, prec)
    return _refined_T(b, n, prec) + factorial(b - 1) * _refined_T(b, n + 1, prec)


def tail_ratio(b: int, K: int, xabs, prec: int = DEFAULT_PREC) -> Interval:
    """``q = e^g(K) |x| / (e^c K^((b-1)/2))``, the geometric ratio dominating the tail from ``K``."""
    xabs = Fraction(xabs)
    if xabs <= 0:
        return Interval(0)
    log_q = (
        g_explicit(K, prec)
        + interval_log(xabs, prec)
        - bound_constant_c(b, prec)
        - Fraction(b - 1, 2) * interval_log(K, prec)
    )
    return interval_exp(log_q, prec).round_out(prec)


def _explicit_tail(b: int, K: int, xabs: Fraction, which: str, derivative: bool, prec: int) -> Interval:
    if K < 2:
        raise TailBoundError("explicit tail needs a starting order of at least 2")
    if xabs == 0:
        return Interval(0)
    q = tail_ratio(b, K, xabs, prec)
    if q.hi >= 1:
        raise TailBoundError(
            f"tail bound inapplicable at this radius/order: q >= 1 for b={b}, order {K}, |x|={float(xabs):.6g}"
        )
    one_minus = 1 - q
    if derivative:
        # sum_{n>=K} n q^n / |x|
        val = q**K * (K * one_minus + q) / (one_minus.sqr() * xabs)
    else:
        val = q**K / one_minus
    if which == "S":
        val = (factorial(b - 1) + 1) * interval_exp(g_explicit(K, prec), prec) * val
    return val.round_out(prec)


def tail_bound(
    b: int,
    N: int,
    xabs,
    M: int | None = None,
    which: str = "T",
    derivative: bool = False,
    prec: int = DEFAULT_PREC,
) -> Interval:
    """Bound on ``|sum_{n >= N} t_n x^n|`` for ``|x| <= xabs``.

    Without ``M`` the closed-form geometric tail is used.  With ``M > N`` the
    orders ``N <= n < M`` use the refined coefficient bound and the rest the
    geometric tail from ``M``.  ``which="S"`` bounds the tail of ``S``;
    ``derivative=True`` bounds the tail of the derivative,
    ``sum_{n >= N} n |t_n| |x|^(n-1)``.
    """
    _check(b, which)
    xabs = Fraction(xabs)
    if xabs < 0:
        raise ValueError("xabs must be non-negative")
    if xabs == 0:
        if derivative and N <= 1:
            return coeff_bound_refined(b, 1, which, prec)
        return Interval(0)
    if M is None:
        return _explicit_tail(b, N, xabs, which, derivative, prec)
    if M <= N:
        raise ValueError("split point M must exceed N")
    head = Interval(0)
    for n in range(N, M):
        cb = coeff_bound_refined(b, n, which, prec)
        head = head + (cb * (n * xabs ** (n - 1)) if derivative else cb * xabs**n)
    return (head + _explicit_tail(b, M, xabs, which, derivative, prec)).round_out(prec)


def best_tail_bound(
    b: int,
    N: int,
    xabs,
    which: str = "T",
    derivative: bool = False,
    prec: int = DEFAULT_PREC,
    max_extra: int = 400,
) -> tuple[Interval, int]:
    """Smallest split tail bound over split points ``M``; returns ``(bound, M)``.

    Candidates are scanned in steps of 2 up to ``N + max_extra``; the scan
    stops once the head sum alone exceeds the best total found.
    """
    _check(b, which)
    xabs = Fraction(xabs)
    if xabs == 0:
        return tail_bound(b, N, xabs, None, which, derivative, prec), N
    best: tuple[Interval, int] | None = None
    head = Interval(0)
    n = N
    for M in range(N + 1, N + max_extra + 1):
        cb = coeff_bound_refined(b, n, which, prec)
        head = head + (cb * (n * xabs ** (n - 1)) if derivative else cb * xabs**n)
        n += 1
        if best is not None and head.hi >= best[0].hi:
            break
        if (M - N) % 2:
            continue
        try:
            tail = _explicit_tail(b, M, xabs, which, derivative, prec)
        except TailBoundError:
            continue
        total = (head + tail).round_out(prec)
        if best is None or total.hi < best[0].hi:
            best = (total, M)
        if tail.hi * 10**6 < head.hi:
            break
    if best is None:
        raise TailBoundError(
            f"no split point up to {N + max_extra} makes the tail bound applicable "
            f"for b={b}, N={N}, |x|={float(xabs):.6g}"
        )
    return best
