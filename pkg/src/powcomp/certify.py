"""Certified location of the dominant zero of ``T`` and the constants it determines.

The truncation ``T_N`` is a polynomial with exact rational coefficients.
Bounds from :mod:`powcomp.bounds` control ``T - T_N`` on a disk, so any
enclosure of ``T_N`` inflated by that tail is an enclosure of ``T``.

Circle scans use a fixed-point complex ball evaluator: numbers are integers in
units of ``2**-prec`` plus an integer radius, and the variable is rescaled by
``(b-1)!`` so that the coefficients stay of moderate size.  Sample points are
the rational points ``R((1 - t^2) + 2ti) / (1 + t^2)``, which lie exactly on
the circle, so no transcendental functions are needed to cover it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt
from typing import Sequence

from .bounds import best_tail_bound
from .errors import CertificationError, ComputationError, TailBoundError
from .interval import (
    ComplexBox,
    Interval,
    interval_exp,
    interval_log,
    interval_pi,
    interval_sqrt,
    round_up,
)
from .series import Series, det_S, det_T, newton_real_root, real_sign_changes

__all__ = [
    "Interval",
    "ComplexBox",
    "interval_exp",
    "interval_log",
    "interval_sqrt",
    "interval_pi",
    "CertifiedPole",
    "CircleScan",
    "tail_at",
    "eval_T_with_tail",
    "isolate_positive_root",
    "scan_circle",
    "min_modulus_on_circle",
    "count_zeros_in_disk",
    "heuristic_root",
    "radius_candidates",
    "certified_constants",
]

BALL_PREC = 160


# --- tails -------------------------------------------------------------------


@lru_cache(maxsize=None)
def _tail_cached(b: int, N: int, key: Fraction, which: str, derivative: bool) -> Fraction:
    bound, _ = best_tail_bound(b, N, key, which, derivative)
    return bound.hi


def tail_at(b: int, N: int, xabs, which: str = "T", derivative: bool = False) -> Fraction:
    """Upper bound on the order-``N`` tail for ``|x| <= xabs``.

    ``xabs`` is first rounded up to 12 significant bits so that nearby radii
    share one (monotone, hence still valid) bound.
    """
    xabs = Fraction(xabs)
    if xabs <= 0:
        return _tail_cached(b, N, Fraction(0), which, derivative)
    return _tail_cached(b, N, round_up(xabs, 12), which, derivative)


def _abs_upper(x) -> Fraction:
    if isinstance(x, ComplexBox):
        return interval_sqrt(Interval(x.re.mag**2 + x.im.mag**2)).hi
    if isinstance(x, Interval):
        return x.mag
    return abs(Fraction(x))


def eval_T_with_tail(b: int, N: int, x):
    """Enclosure of the full ``T(x)`` for a real interval or a complex box ``x``."""
    B = tail_at(b, N, _abs_upper(x))
    T = det_T(b, N)
    if isinstance(x, ComplexBox):
        acc = ComplexBox(Interval(0), Interval(0))
        for c in reversed(T.coeffs):
            acc = acc * x + c
        return acc.inflate(B)
    return T.eval_interval(x).inflate(B)


def _eval_with_tail(poly: Series, x: Interval, tail: Fraction) -> Interval:
    return poly.eval_interval(x).inflate(tail)


# --- real root isolation -----------------------------------------------------


def _real_tail(b: int, N: int, hi: Fraction) -> Fraction:
    return tail_at(b, N, abs(hi))


def isolate_positive_root(
    b: int,
    N: int,
    search_hi,
    width_target=Fraction(1, 10**12),
    max_candidates: int = 64,
    max_steps: int = 400,
) -> Interval:
    """Interval of width at most ``width_target`` containing the smallest positive zero of ``T``.

    Bisection starts from ``[0, search_hi]`` and discards every piece on which
    the tail-inflated enclosure of ``T_N`` excludes zero.  The leftmost
    surviving cluster is returned once the endpoints carry certified opposite
    signs, which proves that a zero lies inside.
    """
    T = det_T(b, N)
    search_hi = Fraction(search_hi)
    width_target = Fraction(width_target)
    if search_hi <= 0:
        raise ValueError("search_hi must be positive")
    cands = [Interval(0, search_hi)]
    floor_width = width_target / 2**24
    for _ in range(max_steps):
        nxt = [
            half
            for I in cands
            for half in I.split()
            if _eval_with_tail(T, half, _real_tail(b, N, half.hi)).contains_zero()
        ]
        if not nxt:
            raise CertificationError(f"no sign change of T on (0, {search_hi}) for b={b}", stage="isolate")
        nxt.sort(key=lambda I: I.lo)
        # the leftmost cluster of touching pieces holds the smallest zero
        cluster = [nxt[0]]
        for I in nxt[1:]:
            if I.lo > cluster[-1].hi:
                break
            cluster.append(I)
        if Interval.hull(*cluster).width <= width_target or nxt[0].width <= floor_width:
            break
        if len(cluster) > max_candidates:
            # the tail band is wider than the pieces: the enclosure can no longer shrink
            break
        cands = cluster if len(nxt) > max_candidates else nxt
    else:
        raise CertificationError("root isolation did not converge", stage="isolate")
    hull = Interval.hull(*cluster)
    B = _real_tail(b, N, hull.hi)
    lo_val = _eval_with_tail(T, Interval(hull.lo), B)
    hi_val = _eval_with_tail(T, Interval(hull.hi), B)
    if lo_val.contains_zero() or hi_val.contains_zero() or (lo_val.lo > 0) == (hi_val.lo > 0):
        raise CertificationError(
            f"no certified sign change on {hull}; increase the truncation order", stage="isolate"
        )
    if hull.width > width_target:
        raise CertificationError(
            f"root enclosure width {float(hull.width):.3g} exceeds the target; "
            "the tail bound is too large, increase the truncation order",
            stage="isolate",
        )
    return hull


# --- complex circle scans ----------------------------------------------------


class _BallPoly:
    """Polynomial ``sum a_n u^n`` with ``a_n = c_n scale^n`` in fixed point."""

    def __init__(self, coeffs: Sequence[Fraction], scale: Fraction, prec: int):
        self.prec = prec
        self.scale = Fraction(scale)
        self.coeffs = [
            ((Fraction(c) * self.scale**n).numerator << prec) // (Fraction(c) * self.scale**n).denominator
            for n, c in enumerate(coeffs)
        ]

    def to_fixed(self, z: tuple[Fraction, Fraction]) -> tuple[int, int]:
        P = self.prec
        x, y = z[0] / self.scale, z[1] / self.scale
        return (x.numerator << P) // x.denominator, (y.numerator << P) // y.denominator

    def eval(self, cr: int, ci: int, r: int) -> tuple[int, int, int]:
        """Ball ``(re, im, rad)`` enclosing the values on the disc of centre ``c`` and radius ``r``."""
        P = self.prec
        cm = isqrt(cr * cr + ci * ci) + 1
        coeffs = self.coeffs
        ar, ai, rad = coeffs[-1], 0, 1
        for A in reversed(coeffs[:-1]):
            am = isqrt(ar * ar + ai * ai) + 1
            ar, ai = ((ar * cr - ai * ci) >> P) + A, (ar * ci + ai * cr) >> P
            rad = ((am * r + rad * cm + rad * r) >> P) + 4
        return ar, ai, rad


def _circle_point(R: Fraction, q: int, t: Fraction) -> tuple[Fraction, Fraction]:
    d = 1 + t * t
    x, y = R * (1 - t * t) / d, R * 2 * t / d
    for _ in range(q % 4):
        x, y = -y, x
    return x, y


@dataclass(frozen=True)
class _Arc:
    q: int
    ta: Fraction
    tb: Fraction
    re: int
    im: int
    rad: int


@dataclass(frozen=True)
class CircleScan:
    """Result of a certified scan of a polynomial over ``|x| = R``.

    ``min_lower``/``min_upper`` bracket ``min |p(x)|`` on the circle and
    ``winding`` is the number of zeros of the polynomial inside it.
    """

    R: Fraction
    min_lower: Fraction
    min_upper: Fraction
    winding: int
    arcs: int
    argmin: tuple[float, float] = field(default=(0.0, 0.0))


def scan_circle(
    coeffs: Sequence,
    R,
    scale=1,
    margin=Fraction(0),
    subdivisions_init: int = 64,
    max_depth: int = 40,
    prec: int = BALL_PREC,
    rel_tol=Fraction(1, 100),
) -> CircleScan:
    """Cover ``|x| = R`` by discs on which ``|p| > margin`` and count the zeros inside.

    Each arc between consecutive sample points is enclosed by a disc centred
    at its midpoint with radius the larger endpoint chord (the distance to
    the midpoint grows monotonically along an arc shorter than a half turn).
    Arcs are bisected until the ball value excludes the ``margin`` disc, and
    then further around the minimum until ``min |p|`` is bracketed to
    relative accuracy ``rel_tol``.
    """
    rel_tol = Fraction(rel_tol)
    R = Fraction(R)
    margin = Fraction(margin)
    if R <= 0:
        raise ValueError("radius must be positive")
    poly = _BallPoly([Fraction(c) for c in coeffs], Fraction(scale), prec)
    P = prec
    margin_ulps = (margin.numerator << P) // margin.denominator + 1 if margin > 0 else 0
    scale = Fraction(scale)
    denom_sq = scale * scale

    def disc(q: int, ta: Fraction, tb: Fraction) -> tuple[int, int, int]:
        tm = (ta + tb) / 2
        za, zb, zm = _circle_point(R, q, ta), _circle_point(R, q, tb), _circle_point(R, q, tm)
        d2 = max((za[0] - zm[0]) ** 2 + (za[1] - zm[1]) ** 2, (zb[0] - zm[0]) ** 2 + (zb[1] - zm[1]) ** 2)
        scaled = d2 / denom_sq
        r = isqrt((scaled.numerator << (2 * P)) // scaled.denominator) + 1 + 2
        cr, ci = poly.to_fixed(zm)
        return poly.eval(cr, ci, r)

    def fail(q: int, ta: Fraction, tb: Fraction, why: str):
        z = _circle_point(R, q, (ta + tb) / 2)
        raise CertificationError(
            f"{why} near x = {float(z[0]):.12g}{float(z[1]):+.12g}i on |x| = {float(R)}",
            stage="circle",
        )

    accepted: list[tuple[_Arc, int]] = []
    stack = []
    for q in range(4):
        for k in reversed(range(subdivisions_init)):
            stack.append((q, Fraction(k, subdivisions_init), Fraction(k + 1, subdivisions_init), 0))
    while stack:
        q, ta, tb, depth = stack.pop()
        re, im, rad = disc(q, ta, tb)
        mod_lo = isqrt(re * re + im * im)
        if mod_lo - rad > margin_ulps:
            accepted.append((_Arc(q, ta, tb, re, im, rad), depth))
            continue
        if mod_lo + 1 + rad <= margin_ulps:
            fail(q, ta, tb, f"|p| <= {float(margin):.3g}")
        if depth >= max_depth:
            fail(q, ta, tb, f"cannot certify |p| > {float(margin):.3g} after {max_depth} subdivisions")
        tm = (ta + tb) / 2
        stack.append((q, tm, tb, depth + 1))
        stack.append((q, ta, tm, depth + 1))

    def lower(a: _Arc) -> int:
        return isqrt(a.re * a.re + a.im * a.im) - a.rad

    def upper(a: _Arc) -> int:
        return isqrt(a.re * a.re + a.im * a.im) + 1 + a.rad

    # tighten the bracket of the minimum by splitting the arcs that may hold it
    for _ in range(4 * max_depth):
        best_upper = min(upper(a) for a, _ in accepted)
        threshold = best_upper - (best_upper * rel_tol.numerator) // rel_tol.denominator
        keep, redo = [], []
        for a, depth in accepted:
            (redo if lower(a) < threshold and depth < max_depth else keep).append((a, depth))
        if not redo:
            break
        for a, depth in redo:
            tm = (a.ta + a.tb) / 2
            for ta, tb in ((a.ta, tm), (tm, a.tb)):
                re, im, rad = disc(a.q, ta, tb)
                keep.append((_Arc(a.q, ta, tb, re, im, rad), depth + 1))
        accepted = keep
    arcs = [a for a, _ in accepted]
    lo_arc = min(arcs, key=lower)
    up_arc = min(arcs, key=upper)
    min_lower = Fraction(lower(lo_arc), 1 << P)
    min_upper = Fraction(upper(up_arc), 1 << P)
    zm = _circle_point(R, up_arc.q, (up_arc.ta + up_arc.tb) / 2)
    argmin = (float(zm[0]), float(zm[1]))
    winding = _winding(poly, R, arcs)
    return CircleScan(R, min_lower, min_upper, winding, len(arcs), argmin)


def _endpoint_ball(poly: _BallPoly, R: Fraction, q: int, t: Fraction) -> tuple[int, int, int]:
    cr, ci = poly.to_fixed(_circle_point(R, q, t))
    return poly.eval(cr, ci, 2)


def _sign(center: int, rad: int) -> int:
    if center > rad:
        return 1
    if center < -rad:
        return -1
    return 0


def _winding(poly: _BallPoly, R: Fraction, arcs: list[_Arc]) -> int:
    """Signed crossings of a half-axis by the image of the circle.

    Every arc image lies in a disc avoiding 0, hence in an open half-plane, so
    its net crossing of an axis is that of the chord between the endpoint
    values and happens on the half-axis on the side of the disc centre.
    Both half-axes of one axis are counted; they must agree.
    """
    arcs = sorted(arcs, key=lambda a: (a.q, a.ta))
    ends = {}
    for a in arcs:
        for t in (a.ta, a.tb):
            key = (a.q, t)
            if key not in ends:
                ends[key] = _endpoint_ball(poly, R, a.q, t)
    for axis in ("imag", "real"):
        # for the imaginary axis the sign of Re decides the side, and vice versa
        comp, other = (0, 1) if axis == "imag" else (1, 0)
        signs = {k: _sign(v[comp], v[2]) for k, v in ends.items()}
        if any(s == 0 for s in signs.values()):
            continue
        pos = neg = 0
        for a in arcs:
            sa, sb = signs[(a.q, a.ta)], signs[(a.q, a.tb)]
            if sa == sb:
                continue
            centre = (a.re, a.im)
            side = 1 if centre[other] > 0 else -1
            if axis == "imag":
                # crossing the upper half-axis from Re > 0 to Re < 0 is counterclockwise
                step = 1 if sa > 0 else -1
                if side > 0:
                    pos += step
                else:
                    neg -= step
            else:
                # crossing the right half-axis from Im < 0 to Im > 0 is counterclockwise
                step = 1 if sa < 0 else -1
                if side > 0:
                    pos += step
                else:
                    neg -= step
        if pos != neg:
            raise CertificationError(
                f"inconsistent winding counts {pos} and {neg} on the two half-axes", stage="winding"
            )
        return pos
    raise CertificationError("every axis has an ambiguous endpoint value", stage="winding")


def _scale_for(b: int) -> Fraction:
    return Fraction(factorial(b - 1))


def min_modulus_on_circle(
    b: int,
    N: int,
    R,
    subdivisions_init: int = 64,
    max_depth: int = 40,
) -> Interval:
    """Bracket of ``min |T(x)|`` over ``|x| = R`` for the full ``T``, certified positive.

    Raises :class:`CertificationError` when ``|T_N|`` cannot be shown to
    exceed the tail bound everywhere on the circle.
    """
    R = Fraction(R)
    B = tail_at(b, N, R)
    scan = scan_circle(det_T(b, N).coeffs, R, _scale_for(b), B, subdivisions_init, max_depth)
    return Interval(scan.min_lower - B, scan.min_upper + B)


def count_zeros_in_disk(
    poly: Series | Sequence,
    R,
    subdivisions_init: int = 64,
    scale=1,
    max_depth: int = 40,
) -> int:
    """Number of zeros of a polynomial in ``|x| < R`` (it must not vanish on the circle)."""
    coeffs = poly.coeffs if isinstance(poly, Series) else tuple(poly)
    return scan_circle(coeffs, R, scale, 0, subdivisions_init, max_depth).winding


# --- the dominant pole -------------------------------------------------------


@dataclass(frozen=True)
class CertifiedPole:
    """Certified enclosures for the dominant zero ``rho`` of ``T`` and derived constants."""

    b: int
    N: int
    rho: Interval
    gamma: Interval
    alpha: Interval
    kappa: Interval
    R: Fraction
    zero_count_inside_R: int
    min_modulus: Interval
    tail_at_R: Fraction
    tail_S: Fraction
    tail_T_prime: Fraction


def heuristic_root(b: int, N: int) -> Fraction:
    """Smallest positive zero of ``T_N`` by exact sign scan and Newton polishing."""
    T = det_T(b, N)
    s = factorial(b - 1)
    hi = Fraction(2 * s)
    for _ in range(8):
        cells = real_sign_changes(T, 0, hi, 256)
        if cells:
            a, c = cells[0]
            return newton_real_root(T, (a + c) / 2, bits=200)
        hi *= 2
    raise ComputationError(f"no positive zero of T_{N} found for b={b}", stage="heuristic-root")


def radius_candidates(b: int, rho_hat: Fraction) -> list[Fraction]:
    """Radii tried in order: ``3/2`` for base 2, else ``rho_hat`` times 5/4, 3/2 and 2."""
    if b == 2:
        return [Fraction(3, 2)]
    out = []
    for f in (Fraction(5, 4), Fraction(3, 2), Fraction(2)):
        out.append(round_up(rho_hat * f, 16))
    return out


def certified_constants(
    b: int,
    N: int = 60,
    R=None,
    width=None,
    subdivisions_init: int = 64,
) -> CertifiedPole:
    """Certify that ``T`` has a single zero in ``|x| < R`` and enclose ``rho, gamma, alpha, kappa``.

    ``alpha = -S(rho) / (b! T'(rho))`` is evaluated on the enclosure of rho,
    with the truncations of ``S`` and ``T'`` inflated by their tail bounds.
    """
    rho_hat = heuristic_root(b, N)
    radii = [Fraction(R)] if R is not None else radius_candidates(b, rho_hat)
    failures = []
    for radius in radii:
        try:
            B = tail_at(b, N, radius)
            scan = scan_circle(det_T(b, N).coeffs, radius, _scale_for(b), B, subdivisions_init)
        except (CertificationError, TailBoundError) as exc:
            failures.append(f"R={float(radius):.6g}: {exc}")
            continue
        if scan.winding != 1:
            failures.append(f"R={float(radius):.6g}: {scan.winding} zeros inside")
            continue
        break
    else:
        raise CertificationError("no admissible radius; " + "; ".join(failures), stage="certify")
    # Rouche: |T - T_N| <= B < |T_N| on the circle, so T and T_N have equally many zeros inside
    if not scan.min_lower > B:
        raise CertificationError("Rouche condition failed", stage="certify")
    target = Fraction(width) if width is not None else rho_hat / 10**15
    rho = isolate_positive_root(b, N, radius, target)
    if not (0 < rho.lo and rho.hi < radius):
        raise CertificationError(f"root enclosure {rho} is not inside (0, R)", stage="certify")
    B_S = tail_at(b, N, rho.hi, "S")
    B_dT = tail_at(b, N, rho.hi, "T", derivative=True)
    S_val = det_S(b, N).eval_interval(rho).inflate(B_S)
    dT_val = det_T(b, N).derive().eval_interval(rho).inflate(B_dT)
    if dT_val.contains_zero():
        raise CertificationError("T' enclosure contains zero at the root", stage="certify")
    alpha = (-S_val / (factorial(b) * dT_val)).round_out(96)
    gamma = (1 / rho).round_out(96)
    kappa = Interval(rho.lo / radius, rho.hi / radius)
    if not alpha.lo > 0:
        raise CertificationError("alpha enclosure is not positive", stage="certify")
    return CertifiedPole(
        b=b,
        N=N,
        rho=rho,
        gamma=gamma,
        alpha=alpha,
        kappa=kappa,
        R=radius,
        zero_count_inside_R=scan.winding,
        min_modulus=Interval(scan.min_lower - B, scan.min_upper + B),
        tail_at_R=B,
        tail_S=B_S,
        tail_T_prime=B_dT,
    )
