"""Exact enumeration of compositions of 1 into powers of a base ``b``.

A composition with ``n = (b-1)m + 1`` parts arises from the trivial
composition ``(1)`` by ``m`` splits of a part ``b^-k`` into ``b`` parts
``b^-(k+1)``.  Partitions are tracked through the multiplicity ``r`` of their
largest exponent; undoing the splits of ``s`` of those largest parts gives the
weight recursion implemented by :func:`weight_table`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Mapping

from .errors import ComputationError, OracleScaleError
from .series import Series

__all__ = [
    "BaseParams",
    "WeightTable",
    "ParamDistribution",
    "oracle_guard",
    "brute_force_q",
    "brute_force_partitions",
    "weight_table",
    "q",
    "q_values",
    "w1_coeffs",
    "ws",
    "max_reps",
    "param_polynomials",
    "param_distribution",
]

PARAM_KINDS = ("largest", "distinct")


@dataclass(frozen=True)
class BaseParams:
    b: int

    def __post_init__(self):
        if not isinstance(self.b, int) or self.b < 2:
            raise ValueError(f"base must be an integer >= 2, got {self.b!r}")

    def parts(self, m: int) -> int:
        """Number of parts ``(b-1)m + 1`` of a composition built from ``m`` splits."""
        return (self.b - 1) * m + 1


def oracle_guard(b: int) -> int:
    """Default largest ``m`` allowed for the enumeration oracles."""
    return 12 if b == 2 else 6 if b == 3 else 4


def _check_guard(b: int, m: int, guard: int | None) -> None:
    limit = oracle_guard(b) if guard is None else guard
    if m > limit:
        raise OracleScaleError(
            f"oracle scale exceeded: m={m} > guard {limit} for base {b}"
        )


def brute_force_partitions(b: int, m: int, guard: int | None = None) -> list[tuple[int, ...]]:
    """All nonincreasing-in-part-size exponent tuples ``k`` with ``sum b^-k_i = 1``.

    Found by depth-first search over nondecreasing exponent sequences of
    length ``n = (b-1)m + 1``, independently of the split recursion.
    """
    BaseParams(b)
    if m < 0:
        raise ValueError("m must be non-negative")
    _check_guard(b, m, guard)
    n = (b - 1) * m + 1
    out: list[tuple[int, ...]] = []
    # each part b^-k with k <= m, since m splits can deepen any part at most m times
    kmax = m

    def dfs(prefix: list[int], remaining: Fraction, count: int, kmin: int) -> None:
        if count == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for k in range(kmin, kmax + 1):
            part = Fraction(1, b**k)
            if part > remaining:
                continue
            # all later parts are at most this size
            if count * part < remaining:
                break
            prefix.append(k)
            dfs(prefix, remaining - part, count - 1, k)
            prefix.pop()

    dfs([], Fraction(1), n, 0)
    return out


def _multinomial(k: tuple[int, ...]) -> int:
    counts: dict[int, int] = defaultdict(int)
    for e in k:
        counts[e] += 1
    out = factorial(len(k))
    for c in counts.values():
        out //= factorial(c)
    return out


def brute_force_q(b: int, m: int, guard: int | None = None) -> int:
    """Number of ordered solutions of ``b^-k_1 + ... + b^-k_n = 1``, ``n = (b-1)m + 1``."""
    return sum(_multinomial(k) for k in brute_force_partitions(b, m, guard))


@dataclass(frozen=True)
class WeightTable:
    """``w[m][r]``: total weight of partitions with ``m`` splits and ``r`` largest parts."""

    b: int
    m_max: int
    w: tuple[Mapping[int, Fraction], ...] = field(repr=False)

    def __getitem__(self, m: int) -> Mapping[int, Fraction]:
        return self.w[m]

    def get(self, m: int, r: int) -> Fraction:
        return self.w[m].get(r, Fraction(0))

    def total(self, m: int) -> Fraction:
        return sum(self.w[m].values(), Fraction(0))


@lru_cache(maxsize=None)
def weight_table(b: int, m_max: int) -> WeightTable:
    BaseParams(b)
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    rows: list[dict[int, Fraction]] = [defaultdict(Fraction) for _ in range(m_max + 1)]
    rows[0][1] = Fraction(1)
    fb = [factorial(b * s) for s in range(m_max + 1)]
    for m in range(m_max + 1):
        for r, v in sorted(rows[m].items()):
            fr = factorial(r)
            for s in range(1, min(r, m_max - m) + 1):
                rows[m + s][b * s] += v * Fraction(fr, factorial(r - s) * fb[s])
    frozen = tuple(dict(sorted((r, v) for r, v in row.items() if v)) for row in rows)
    return WeightTable(b, m_max, frozen)


def q(b: int, m: int) -> int:
    """``q_b(m)``: number of compositions of 1 with ``(b-1)m + 1`` parts."""
    if m < 0:
        raise ValueError("m must be non-negative")
    total = weight_table(b, m).total(m) * factorial((b - 1) * m + 1)
    if total.denominator != 1:
        raise ComputationError(f"non-integral q_{b}({m}) = {total}", stage="weight-recursion")
    return total.numerator


def q_values(b: int, upto: int) -> list[int]:
    table = weight_table(b, upto)
    out = []
    for m in range(upto + 1):
        v = table.total(m) * factorial((b - 1) * m + 1)
        if v.denominator != 1:
            raise ComputationError(f"non-integral q_{b}({m}) = {v}", stage="weight-recursion")
        out.append(v.numerator)
    return out


@lru_cache(maxsize=None)
def w1_coeffs(b: int, N: int) -> Series:
    """``W(x) = sum_n W_b(1, n) x^n / n!`` with coefficients up to and including ``x^N``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    mmax = (N - 1) // (b - 1)
    table = weight_table(b, mmax)
    coeffs = [Fraction(0)] * (N + 1)
    for m in range(mmax + 1):
        coeffs[(b - 1) * m + 1] = table.total(m)
    return Series(coeffs)


@lru_cache(maxsize=None)
def _w_powers(b: int, n: int) -> tuple[Series, ...]:
    """``W^s`` truncated after ``x^n`` for ``s = 1..n``."""
    W = w1_coeffs(b, n)
    powers = [W]
    for _ in range(1, n):
        powers.append(powers[-1] * W)
    return tuple(powers)


def ws(b: int, s: int, n: int) -> Fraction:
    """``W_b(s, n) / n! = [x^n] W(x)^s``."""
    BaseParams(b)
    if s < 1:
        raise ValueError("s must be at least 1")
    if n < s:
        return Fraction(0)
    return _w_powers(b, n)[s - 1][n]


def max_reps(b: int, n: int) -> tuple[int, int]:
    """``(M(n), s*)`` with ``M(n) = max_s W_b(s, n)``; ties go to the smaller ``s``."""
    BaseParams(b)
    if n < 1:
        raise ValueError("n must be at least 1")
    fn = factorial(n)
    powers = _w_powers(b, n)
    best, arg = -1, 0
    for s in range(1, n + 1):
        v = powers[s - 1][n] * fn
        if v.denominator != 1:
            raise ComputationError(f"non-integral W_{b}({s},{n})", stage="convolution")
        if v.numerator > best:
            best, arg = v.numerator, s
    return best, arg


@lru_cache(maxsize=None)
def param_polynomials(b: int, m_max: int, kind: str) -> tuple[dict[int, Fraction], ...]:
    """Marker polynomials: entry ``m`` maps ``value -> sum of wt(k)`` over ``m``-split partitions.

    Multiplying an entry by ``((b-1)m+1)!`` gives composition counts per value.
    """
    BaseParams(b)
    if kind not in PARAM_KINDS:
        raise ValueError(f"unknown parameter kind {kind!r}")
    # w[m][r][value]
    w: list[dict[int, dict[int, Fraction]]] = [
        defaultdict(lambda: defaultdict(Fraction)) for _ in range(m_max + 1)
    ]
    w[0][1][0 if kind == "largest" else 1] = Fraction(1)
    for m in range(m_max + 1):
        for r, poly in sorted(w[m].items()):
            fr = factorial(r)
            for s in range(1, min(r, m_max - m) + 1):
                f = Fraction(fr, factorial(r - s) * factorial(b * s))
                step = 1 if kind == "largest" or s < r else 0
                target = w[m + s][b * s]
                for value, v in poly.items():
                    target[value + step] += v * f
    out = []
    for m in range(m_max + 1):
        tot: dict[int, Fraction] = defaultdict(Fraction)
        for poly in w[m].values():
            for value, v in poly.items():
                tot[value] += v
        out.append(dict(sorted(tot.items())))
    return tuple(out)


@dataclass(frozen=True)
class ParamDistribution:
    b: int
    m: int
    kind: str
    pmf: Mapping[int, Fraction]
    counts: Mapping[int, int]

    @property
    def mean(self) -> Fraction:
        return sum((k * p for k, p in self.pmf.items()), Fraction(0))

    @property
    def variance(self) -> Fraction:
        mu = self.mean
        return sum((k * k * p for k, p in self.pmf.items()), Fraction(0)) - mu * mu

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def param_distribution(b: int, m: int, kind: str, guard: int | None = None) -> ParamDistribution:
    """Exact law of the largest exponent or of the number of distinct parts on ``C_m``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    _check_guard(b, m, guard)
    poly = param_polynomials(b, m, kind)[m]
    fn = factorial((b - 1) * m + 1)
    counts = {}
    for value, v in poly.items():
        c = v * fn
        if c.denominator != 1:
            raise ComputationError(f"non-integral count for value {value}", stage="weight-recursion")
        counts[value] = c.numerator
    total = sum(counts.values())
    pmf = {value: Fraction(c, total) for value, c in counts.items()}
    return ParamDistribution(b, m, kind, pmf, counts)
