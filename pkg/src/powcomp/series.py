"""Truncated power series over the rationals and the transfer-matrix determinants.

The transfer matrix has entries ``m_ij = (bj)! x^i / ((bj-i)! (bi)!)`` for
``i <= bj``.  Every entry in row ``i`` is a monomial of degree ``i``, which is
what makes the truncated determinants cheap: a coefficient of ``x^n`` only
sees rows with index at most ``n``.

Instead of eliminating a dense matrix of series we compute the resolvent
``R = (I - A)^{-1} A`` column by column through the degree recursion

    [x^n] R_ij = c_ij [n == i] + sum_k c_ik [x^(n-i)] R_kj,

then recover ``T = det(I - A)`` from ``x T'/T = -tr(diag(i) R)`` (Newton's
identities) and ``S = T (1 + sum_i R_i1)`` (adjugate row sum).  Scaling the
coefficient of ``x^n`` by ``(bn)!`` keeps the recursion in integers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Sequence

from .errors import NewtonError

__all__ = [
    "Series",
    "BiSeries",
    "matrix_entry",
    "det_T",
    "det_S",
    "det_T_largest",
    "det_T_distinct",
    "parameter_gf",
    "det_block",
    "transfer_block",
    "implicit_root_u",
    "newton_real_root",
    "real_sign_changes",
]

KINDS = ("largest", "distinct")


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class Series:
    """Dense truncated power series; index ``i`` holds the coefficient of ``x^i``.

    The order is the number of stored coefficients, so a series of order N is
    known modulo ``x^N``.  Binary operations truncate to the smaller order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        self.coeffs = tuple(_frac(c) for c in coeffs)

    @classmethod
    def zero(cls, order: int) -> "Series":
        return cls([0] * order)

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls([1] + [0] * (order - 1))

    @classmethod
    def monomial(cls, coeff, power: int, order: int) -> "Series":
        c = [Fraction(0)] * order
        if power < order:
            c[power] = _frac(coeff)
        return cls(c)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Series):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Series([{', '.join(str(c) for c in self.coeffs)}])"

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return Series(self.coeffs[:order])

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        return Series.monomial(other, 0, self.order)

    def __add__(self, other) -> "Series":
        other = self._coerce(other)
        n = min(self.order, other.order)
        return Series(self.coeffs[i] + other.coeffs[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(-c for c in self.coeffs)

    def __sub__(self, other) -> "Series":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Series":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Series":
        if not isinstance(other, Series):
            c = _frac(other)
            return Series(a * c for a in self.coeffs)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * n
        for i in range(n):
            ai = a[i]
            if not ai:
                continue
            for j in range(n - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return Series(out)

    __rmul__ = __mul__

    def inverse(self) -> "Series":
        a = self.coeffs
        if not a or a[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = 1 / a[0]
        out = [inv0]
        for n in range(1, self.order):
            s = sum((a[k] * out[n - k] for k in range(1, n + 1) if a[k]), Fraction(0))
            out.append(-s * inv0)
        return Series(out)

    def __truediv__(self, other) -> "Series":
        if not isinstance(other, Series):
            return self * (1 / _frac(other))
        return self * other.inverse()

    def __pow__(self, k: int) -> "Series":
        result = Series.one(self.order)
        for _ in range(k):
            result = result * self
        return result

    def derive(self) -> "Series":
        return Series(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, x):
        """Exact Horner evaluation at a rational (or anything closed under + and *)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_interval(self, x):
        """Horner evaluation on an :class:`~powcomp.interval.Interval` (exact, no rounding)."""
        from .interval import Interval

        x = x if isinstance(x, Interval) else Interval(x)
        acc = Interval(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


class BiSeries:
    """Series in ``x`` whose coefficients are polynomials in ``u = y - 1`` modulo ``u^3``.

    ``coeffs[n] == (c0, c1, c2)`` is the coefficient of ``x^n``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Sequence]):
        self.coeffs = tuple(tuple(_frac(c) for c in triple) for triple in coeffs)
        if any(len(t) != 3 for t in self.coeffs):
            raise ValueError("BiSeries coefficients must be triples (u^0, u^1, u^2)")

    @classmethod
    def from_slices(cls, s0: Series, s1: Series, s2: Series) -> "BiSeries":
        n = min(s0.order, s1.order, s2.order)
        return cls(zip(s0.coeffs[:n], s1.coeffs[:n], s2.coeffs[:n]))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __eq__(self, other) -> bool:
        if isinstance(other, BiSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"BiSeries(order={self.order})"

    def u_slice(self, k: int) -> Series:
        """Coefficient series of ``u^k``."""
        return Series(c[k] for c in self.coeffs)


def matrix_entry(b: int, i: int, j: int) -> Fraction:
    """Coefficient of ``x^i`` in the transfer-matrix entry ``m_ij`` (0 when ``i > bj``)."""
    if i < 1 or j < 1:
        raise ValueError("matrix indices start at 1")
    if i > b * j:
        return Fraction(0)
    return Fraction(factorial(b * j), factorial(b * j - i) * factorial(b * i))


def _check(b: int, N: int) -> None:
    if b < 2:
        raise ValueError("base must be at least 2")
    if N < 1:
        raise ValueError("truncation order must be at least 1")


def _marked(kind: str | None, b: int, i: int, k: int) -> bool:
    if kind == "largest":
        return True
    # distinct parts: splitting every largest part (i == bk) keeps the count
    return i < b * k


@lru_cache(maxsize=None)
def _resolvent_scalar(b: int, N: int, block: int):
    """Scaled traces ``(bn)! [x^n] tr(diag(i) R)`` and ``(bn)! [x^n] sum_i R_i1``."""
    K = min(block, N - 1)
    binom = [[comb(b * k, i) for k in range(K + 1)] for i in range(K + 1)]
    fact = [factorial(i) for i in range(K + 1)]
    tau = [0] * N
    col1 = [0] * N
    for j in range(1, K + 1):
        r = [[0] * (min(n, K) + 1) for n in range(N)]
        for n in range(1, N):
            row = r[n]
            for i in range(1, min(n, K) + 1):
                prev = r[n - i]
                bi = binom[i]
                s = bi[j] if n == i else 0
                for k in range(1, len(prev)):
                    v = prev[k]
                    if v:
                        s += bi[k] * v
                if s:
                    row[i] = comb(b * n, b * i) * fact[i] * s
        for n in range(j, N):
            tau[n] += j * r[n][j]
        if j == 1:
            col1 = [sum(r[n]) for n in range(N)]
    return tau, col1


@lru_cache(maxsize=None)
def _resolvent_marked(b: int, N: int, kind: str, block: int):
    """As :func:`_resolvent_scalar` for ``I - A(y)`` with entries carrying ``y = 1 + u``.

    Values are integer triples (u^0, u^1, u^2).
    """
    K = min(block, N - 1)
    binom = [[comb(b * k, i) for k in range(K + 1)] for i in range(K + 1)]
    mark = [[_marked(kind, b, i, k) for k in range(K + 1)] for i in range(K + 1)]
    fact = [factorial(i) for i in range(K + 1)]
    zero = (0, 0, 0)
    tau = [[0, 0, 0] for _ in range(N)]
    col1 = [[0, 0, 0] for _ in range(N)]
    for j in range(1, K + 1):
        r = [[zero] * (min(n, K) + 1) for n in range(N)]
        for n in range(1, N):
            row = r[n]
            for i in range(1, min(n, K) + 1):
                prev = r[n - i]
                bi, mi = binom[i], mark[i]
                a0 = a1 = a2 = 0
                if n == i and bi[j]:
                    a0 = bi[j]
                    if mi[j]:
                        a1 = a0
                for k in range(1, len(prev)):
                    v = prev[k]
                    if v is zero:
                        continue
                    c = bi[k]
                    if not c:
                        continue
                    v0, v1, v2 = v
                    if mi[k]:
                        a0 += c * v0
                        a1 += c * (v1 + v0)
                        a2 += c * (v2 + v1)
                    else:
                        a0 += c * v0
                        a1 += c * v1
                        a2 += c * v2
                if a0 or a1 or a2:
                    f = comb(b * n, b * i) * fact[i]
                    row[i] = (f * a0, f * a1, f * a2)
        for n in range(j, N):
            v = r[n][j]
            if v is not zero:
                t = tau[n]
                t[0] += j * v[0]
                t[1] += j * v[1]
                t[2] += j * v[2]
        if j == 1:
            for n in range(N):
                acc = col1[n]
                for v in r[n]:
                    if v is not zero:
                        acc[0] += v[0]
                        acc[1] += v[1]
                        acc[2] += v[2]
    return [tuple(t) for t in tau], [tuple(c) for c in col1]


def _tmul(a, c):
    return (
        a[0] * c[0],
        a[0] * c[1] + a[1] * c[0],
        a[0] * c[2] + a[1] * c[1] + a[2] * c[0],
    )


def _newton_identities(tau: list) -> list:
    """Coefficients of ``T`` from ``n t_n = -sum_m tau_m t_(n-m)``, ``t_0 = 1``.

    Works for scalars and for triples over Q[u]/u^3.
    """
    N = len(tau)
    if isinstance(tau[0], tuple):
        t = [(Fraction(1), Fraction(0), Fraction(0))]
        for n in range(1, N):
            acc = [Fraction(0)] * 3
            for m in range(1, n + 1):
                p = _tmul(tau[m], t[n - m])
                acc[0] += p[0]
                acc[1] += p[1]
                acc[2] += p[2]
            t.append(tuple(-a / n for a in acc))
        return t
    t = [Fraction(1)]
    for n in range(1, N):
        t.append(-sum((tau[m] * t[n - m] for m in range(1, n + 1)), Fraction(0)) / n)
    return t


def _unscale(values: list, b: int) -> list:
    out = []
    for n, v in enumerate(values):
        d = factorial(b * n)
        if isinstance(v, tuple):
            out.append(tuple(Fraction(x, d) for x in v))
        else:
            out.append(Fraction(v, d))
    return out


@lru_cache(maxsize=None)
def det_T(b: int, N: int, block: int | None = None) -> Series:
    """``det(I - M(x))`` modulo ``x^N``.

    ``block`` limits the matrix to its leading ``block x block`` principal
    part; the default ``N - 1`` is exact for every returned coefficient.
    """
    _check(b, N)
    tau, _ = _resolvent_scalar(b, N, N - 1 if block is None else block)
    return Series(_newton_identities(_unscale(tau, b)))


@lru_cache(maxsize=None)
def det_S(b: int, N: int) -> Series:
    """``det`` of ``I - M(x)`` with its first row replaced by ones, modulo ``x^N``.

    Computed as the adjugate row sum ``1^T adj(I - M) e_1 = T * (1 + sum_i R_i1)``.
    """
    _check(b, N)
    _, col1 = _resolvent_scalar(b, N, N - 1)
    col = _unscale(col1, b)
    col[0] = Fraction(1)
    return det_T(b, N) * Series(col)


def _det_marked(b: int, N: int, kind: str) -> BiSeries:
    _check(b, N)
    if kind not in KINDS:
        raise ValueError(f"unknown parameter kind {kind!r}")
    tau, _ = _resolvent_marked(b, N, kind, N - 1)
    return BiSeries(_newton_identities(_unscale(tau, b)))


@lru_cache(maxsize=None)
def det_T_largest(b: int, N: int) -> BiSeries:
    """``det(I - y M(x))`` with ``y = 1 + u``, modulo ``x^N`` and ``u^3``."""
    return _det_marked(b, N, "largest")


@lru_cache(maxsize=None)
def det_T_distinct(b: int, N: int) -> BiSeries:
    """Determinant of ``I - M*(x, y)``: entries with ``i < bj`` carry ``y``, ``i == bj`` do not."""
    return _det_marked(b, N, "distinct")


@lru_cache(maxsize=None)
def parameter_gf(b: int, N: int, kind: str) -> BiSeries:
    """Bivariate generating function of a composition parameter, modulo ``x^N`` and ``u^3``.

    ``largest``: ``1 + (x y / b!) 1^T (I - y M)^{-1} e_1``;
    ``distinct``: ``y + (x y / b!) 1^T (I - M*)^{-1} e_1``.
    The coefficient of ``x^m`` is ``sum_k wt(k) y^param(k)`` over partitions with ``m`` splits.
    """
    _check(b, N)
    if kind not in KINDS:
        raise ValueError(f"unknown parameter kind {kind!r}")
    _, col1 = _resolvent_marked(b, N, kind, N - 1)
    col = _unscale(col1, b)
    col[0] = (Fraction(1), Fraction(0), Fraction(0))
    bf = factorial(b)
    out = []
    for n in range(N):
        if n == 0:
            c = (Fraction(1), Fraction(0), Fraction(0)) if kind == "largest" else (
                Fraction(1), Fraction(1), Fraction(0))
        else:
            v = col[n - 1]
            # multiply by y / b! = (1 + u) / b!
            c = (v[0] / bf, (v[1] + v[0]) / bf, (v[2] + v[1]) / bf)
        out.append(c)
    return BiSeries(out)


def transfer_block(b: int, K: int, N: int, first_row_ones: bool = False) -> list[list[Series]]:
    """Explicit ``K x K`` leading block of ``I - M(x)`` as series of order ``N``."""
    rows = []
    for i in range(1, K + 1):
        row = []
        for j in range(1, K + 1):
            if first_row_ones and i == 1:
                row.append(Series.one(N))
                continue
            e = -Series.monomial(matrix_entry(b, i, j), i, N)
            if i == j:
                e = e + 1
            row.append(e)
        rows.append(row)
    return rows


def det_block(matrix: Sequence[Sequence[Series]]) -> Series:
    """Determinant of a square matrix of series by series-valued Gaussian elimination.

    A pivot is any entry with nonzero constant term; the routine raises if a
    column has none (not needed for the transfer matrices).
    """
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    order = matrix[0][0].order
    a = [list(row) for row in matrix]
    det = Series.one(order)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col][0] != 0), None)
        if piv is None:
            raise ZeroDivisionError("no invertible pivot in column %d" % col)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        pinv = p.inverse()
        for r in range(col + 1, n):
            f = a[r][col] * pinv
            if all(c == 0 for c in f.coeffs):
                continue
            a[r] = [a[r][k] - f * a[col][k] if k > col else a[r][k] for k in range(n)]
    return det


def _round_iterate(x: Fraction, cap: int) -> Fraction:
    return x.limit_denominator(cap) if x.denominator > cap else x


def implicit_root_u(
    F: BiSeries,
    x_seed,
    tol=Fraction(1, 10**30),
    denominator_cap: int = 10**45,
    max_iter: int = 200,
) -> tuple[Fraction, Fraction, Fraction]:
    """Expand the root of ``F(x, u) = 0`` near ``u = 0`` as ``x0 + x1 u + x2 u^2``.

    ``x0`` comes from Newton's method on the ``u^0`` slice in exact rational
    arithmetic, with each iterate rounded by continued fractions to a
    denominator below ``denominator_cap``.  ``x1`` and ``x2`` follow from
    implicit differentiation evaluated exactly at ``x0``.
    """
    f0, f1, f2 = F.u_slice(0), F.u_slice(1), F.u_slice(2)
    d0 = f0.derive()
    dd0 = d0.derive()
    d1 = f1.derive()
    tol = _frac(tol)
    x = _frac(x_seed)
    for _ in range(max_iter):
        slope = d0(x)
        if slope == 0:
            raise NewtonError("vanishing x-derivative during Newton iteration", stage="implicit-root")
        step = f0(x) / slope
        x = _round_iterate(x - step, denominator_cap)
        if abs(step) <= tol * max(1, abs(x)):
            break
    else:
        raise NewtonError(f"Newton did not converge within {max_iter} iterations", stage="implicit-root")
    fx = d0(x)
    if fx == 0:
        raise NewtonError("vanishing x-derivative at the root", stage="implicit-root")
    x1 = -f1(x) / fx
    x2 = -(dd0(x) * x1 * x1 / 2 + d1(x) * x1 + f2(x)) / fx
    return x, x1, x2


def newton_real_root(poly: Series, seed, bits: int = 200, max_iter: int = 200) -> Fraction:
    """Polish a simple real root of a polynomial by exact Newton steps.

    Iterates are rounded to dyadic rationals with ``bits`` significant bits,
    so the result is an approximation, not an enclosure.
    """
    from .interval import round_down

    d = poly.derive()
    x = _frac(seed)
    tol = Fraction(1, 1 << (bits - 8))
    for _ in range(max_iter):
        slope = d(x)
        if slope == 0:
            raise NewtonError("vanishing derivative during Newton iteration", stage="newton")
        step = poly(x) / slope
        x = round_down(x - step, bits)
        if abs(step) <= tol * max(1, abs(x)):
            return x
    raise NewtonError(f"Newton did not converge within {max_iter} iterations", stage="newton")


def real_sign_changes(poly: Series, lo, hi, steps: int) -> list[tuple[Fraction, Fraction]]:
    """Grid cells ``[a, b]`` of ``[lo, hi]`` on which the polynomial changes sign (exact signs)."""
    lo, hi = _frac(lo), _frac(hi)
    h = (hi - lo) / steps
    out = []
    prev_x = lo
    prev = poly(lo)
    for k in range(1, steps + 1):
        x = lo + k * h
        v = poly(x)
        if prev == 0:
            out.append((prev_x, prev_x))
        elif (prev < 0) != (v < 0) and v != 0:
            out.append((prev_x, x))
        prev_x, prev = x, v
    if prev == 0:
        out.append((prev_x, prev_x))
    return out
