"""High-precision heuristic constants and table reproduction.

Values here come from truncated series evaluated exactly; their uncertainty
is estimated by the change between truncation orders ``N`` and ``N - 5``.
Only ``alpha`` and ``gamma`` (via :mod:`powcomp.certify`) carry enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping

from .certify import CertifiedPole, certified_constants, heuristic_root
from .errors import ComputationError
from .exact import w1_coeffs
from .interval import Interval, interval_pi, interval_sqrt
from .series import (
    det_S,
    det_T,
    implicit_root_u,
    newton_real_root,
    real_sign_changes,
    det_T_distinct,
    det_T_largest,
)

__all__ = [
    "HeuristicValue",
    "ConstantsReport",
    "Tables",
    "decimal_str",
    "theta_nu",
    "max_reps_constants",
    "param_constants",
    "expansion_terms",
    "constants_report",
    "reproduce_tables",
    "TABLE_COLUMNS",
]

NEWTON_BITS = 200
DISCREPANCY_STEP = 5

TABLE_COLUMNS = {
    "table1": ("b", "alpha", "gamma"),
    "table2": ("b", "lambda", "theta", "nu", "mu", "sigma2"),
    "table3": ("b", "mu_l", "sigma2_l", "mu_d", "sigma2_d"),
}


def decimal_str(x: Fraction, digits: int = 20) -> str:
    """``x`` rounded to ``digits`` significant digits."""
    x = Fraction(x)
    if x == 0:
        return "0"
    # shrink huge rationals first; str() of very long integers is refused by the interpreter
    mag = abs(x.numerator).bit_length() - x.denominator.bit_length()
    places = digits + max(0, -mag * 30103 // 100000) + 10
    scaled = round(x * 10**places)
    with localcontext() as ctx:
        ctx.prec = digits
        return str(+(Decimal(scaled).scaleb(-places)))


@dataclass(frozen=True)
class HeuristicValue:
    """A truncation-based value with the order-``N`` versus order-``N-5`` discrepancy."""

    value: Fraction
    uncertainty: Fraction
    provenance: str = "heuristic-truncation"

    def __float__(self) -> float:
        return float(self.value)


def _positive_root_below_one(poly) -> Fraction:
    """The root of ``W_N(x) = 1`` in ``(0, 1]``."""
    shifted = poly - 1
    cells = real_sign_changes(shifted, 0, 1, 64)
    if not cells:
        raise ComputationError("W_N(x) = 1 has no root in (0, 1]", stage="theta")
    a, c = cells[0]
    return newton_real_root(shifted, (a + c) / 2, bits=NEWTON_BITS)


@lru_cache(maxsize=None)
def _theta_raw(b: int, N: int) -> Fraction:
    return _positive_root_below_one(w1_coeffs(b, N))


def theta_nu(b: int, N: int = 60) -> tuple[Fraction, Fraction]:
    """``theta`` with ``W_N(theta) = 1`` (terms up to ``x^N``) and ``nu = 1/theta``."""
    theta = _theta_raw(b, N)
    return theta, 1 / theta


def _sqrt_mid(x: Fraction) -> Fraction:
    return interval_sqrt(Interval(x), 160).mid


@lru_cache(maxsize=None)
def max_reps_constants(b: int, N: int = 60) -> tuple[Fraction, Fraction, Fraction]:
    """``(lambda, mu, sigma2)`` from derivatives of ``W_N`` at ``theta``."""
    theta, _ = theta_nu(b, N)
    W = w1_coeffs(b, N)
    d1 = W.derive()
    d2 = d1.derive()
    w1, w2 = d1(theta), d2(theta)
    tw = theta * w1
    mu = 1 / tw
    sigma2 = w2 / (theta * w1**3) + 1 / tw**2 - 1 / tw
    if sigma2 <= 0:
        raise ComputationError(f"non-positive sigma^2 = {float(sigma2)} for b={b}", stage="max-reps")
    sqrt_2pi_sigma2 = _sqrt_mid(2 * interval_pi(160).mid * sigma2)
    lam = (b - 1) / (tw * sqrt_2pi_sigma2)
    return lam, mu, sigma2


@lru_cache(maxsize=None)
def _param_root(b: int, N: int, kind: str) -> tuple[Fraction, Fraction, Fraction]:
    if kind == "largest":
        F = det_T_largest(b, N)
    elif kind == "distinct":
        F = det_T_distinct(b, N)
    else:
        raise ValueError(f"unknown parameter kind {kind!r}")
    return implicit_root_u(F, heuristic_root(b, N))


@lru_cache(maxsize=None)
def param_constants(b: int, N: int = 40, kind: str = "largest") -> tuple[Fraction, Fraction]:
    """``(mu, sigma2)`` per split for the largest exponent or the number of distinct parts.

    With ``x0(u) = rho + x1 u + x2 u^2`` the zero of the bivariate
    determinant at ``y = 1 + u``, the growth rate is ``B = 1/x0`` and
    ``mu = B'/B``, ``sigma2 = B''/B + B'/B - (B'/B)^2`` at ``u = 0``.
    """
    rho, x1, x2 = _param_root(b, N, kind)
    r1 = x1 / rho
    mu = -r1
    sigma2 = r1 * r1 - 2 * x2 / rho - r1
    return mu, sigma2


def _polish_real_roots(T, count: int, b: int) -> list[Fraction]:
    scale = Fraction(factorial(b - 1))
    L = 2 * scale
    for _ in range(10):
        cells = real_sign_changes(T, -L, L, 800)
        if len(cells) >= count + 1:
            break
        L *= 2
    roots = [newton_real_root(T, (a + c) / 2, bits=NEWTON_BITS) for a, c in cells]
    roots.sort(key=abs)
    if len(roots) < count:
        raise ComputationError(
            f"only {len(roots)} real zeros of T_N isolated, {count} requested", stage="expansion"
        )
    return roots[:count]


@lru_cache(maxsize=None)
def expansion_terms(b: int, N: int = 60, k: int = 3) -> tuple[tuple[Fraction, Fraction], ...]:
    """``(amplitude, base)`` for the ``k`` real zeros of ``T_N`` of smallest modulus.

    ``q_b(m) / n!`` is approximately ``sum amplitude * base^m``; pairs are
    sorted by ``|base|`` descending.
    """
    if k < 1:
        raise ValueError("k must be positive")
    T, S = det_T(b, N), det_S(b, N)
    dT = T.derive()
    bf = factorial(b)
    out = []
    for x in _polish_real_roots(T, k, b):
        amp = -S(x) / (bf * dT(x))
        out.append((amp, 1 / x))
    out.sort(key=lambda p: -abs(p[1]))
    return tuple(out)


@dataclass(frozen=True)
class ConstantsReport:
    """All constants for one base with provenance per value."""

    b: int
    N: int
    N_param: int
    certified: CertifiedPole | None
    heuristic: Mapping[str, HeuristicValue]
    provenance: Mapping[str, str] = field(default_factory=dict)


def _with_discrepancy(f, b: int, N: int) -> tuple[HeuristicValue, ...]:
    hi = f(b, N)
    lo = f(b, N - DISCREPANCY_STEP)
    return tuple(HeuristicValue(v, abs(v - w)) for v, w in zip(hi, lo))


def constants_report(b: int, N: int = 60, N_param: int = 40, certify: bool = True) -> ConstantsReport:
    heuristic: dict[str, HeuristicValue] = {}
    theta, nu = _with_discrepancy(theta_nu, b, N)
    lam, mu, sigma2 = _with_discrepancy(max_reps_constants, b, N)
    heuristic.update(theta=theta, nu=nu, **{"lambda": lam}, mu=mu, sigma2=sigma2)
    mu_l, s_l = _with_discrepancy(lambda bb, n: param_constants(bb, n, "largest"), b, N_param)
    mu_d, s_d = _with_discrepancy(lambda bb, n: param_constants(bb, n, "distinct"), b, N_param)
    heuristic.update(mu_l=mu_l, sigma2_l=s_l, mu_d=mu_d, sigma2_d=s_d)

    def _pole(bb: int, n: int) -> tuple[Fraction, Fraction]:
        amp, base = expansion_terms(bb, n, 1)[0]
        return amp, base

    alpha_h, gamma_h = _with_discrepancy(_pole, b, N)
    heuristic.update(alpha=alpha_h, gamma=gamma_h)
    provenance = {name: "heuristic-truncation" for name in heuristic}
    pole = None
    if certify:
        pole = certified_constants(b, N)
        provenance.update(alpha="certified-enclosure", gamma="certified-enclosure",
                          rho="certified-enclosure", kappa="certified-enclosure")
    return ConstantsReport(b, N, N_param, pole, heuristic, provenance)


@dataclass(frozen=True)
class Tables:
    """Rows of the three constant tables; each cell is an Interval or a HeuristicValue."""

    table1: tuple[dict, ...]
    table2: tuple[dict, ...]
    table3: tuple[dict, ...]

    def as_dict(self) -> dict[str, tuple[dict, ...]]:
        return {"table1": self.table1, "table2": self.table2, "table3": self.table3}


def reproduce_tables(
    b_range: Iterable[int] = range(2, 9),
    N: int = 60,
    N_param: int = 40,
    certify: bool = True,
) -> Tables:
    t1, t2, t3 = [], [], []
    for b in b_range:
        rep = constants_report(b, N, N_param, certify)
        h = rep.heuristic
        if rep.certified is not None:
            t1.append({"b": b, "alpha": rep.certified.alpha, "gamma": rep.certified.gamma})
        else:
            t1.append({"b": b, "alpha": h["alpha"], "gamma": h["gamma"]})
        t2.append({"b": b, "lambda": h["lambda"], "theta": h["theta"], "nu": h["nu"],
                   "mu": h["mu"], "sigma2": h["sigma2"]})
        t3.append({"b": b, "mu_l": h["mu_l"], "sigma2_l": h["sigma2_l"],
                   "mu_d": h["mu_d"], "sigma2_d": h["sigma2_d"]})
    return Tables(tuple(t1), tuple(t2), tuple(t3))
