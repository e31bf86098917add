"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

from __future__ import annotations

import io
import json
import random
import time
from contextlib import redirect_stdout
from fractions import Fraction as F
from math import factorial

from conftest import ACCEPTANCE_LINES
from powcomp.bounds import coeff_bound_explicit, coeff_bound_refined, tail_bound
from powcomp.certify import certified_constants
from powcomp.cli import main, shared_decimal
from powcomp.constants import expansion_terms, max_reps_constants, param_constants, theta_nu
from powcomp.exact import brute_force_q, max_reps, param_distribution, q, weight_table
from powcomp.interval import Interval
from powcomp.series import Series, det_S, det_T

SEQUENCE = [1, 1, 3, 13, 75, 525, 4347, 41245, 441675, 5259885, 68958747]

TABLE1 = {
    2: ("0.296372", "1.19268"),
    3: ("0.279852", "0.534502"),
    4: ("0.236824", "0.170268"),
    5: ("0.196844", "0.0419317"),
    6: ("0.165917", "0.00834837"),
    7: ("0.142679", "0.00138959"),
    8: ("0.1249575", "0.000198440"),
}

# lambda, theta, nu, mu, sigma^2
TABLE2 = {
    2: (0.27693430, 0.57071698, 1.75218196, 0.44867215, 0.41775807),
    3: (0.70656285, 0.84340237, 1.18567368, 0.66924459, 0.57114748),
    4: (1.70314663, 0.95872521, 1.04305174, 0.87318716, 0.37650717),
    5: (4.20099030, 0.99167231, 1.00839763, 0.96645454, 0.13477198),
    6: (10.61691472, 0.99861115, 1.00139078, 0.99304650, 0.03480989),
    7: (28.28286119, 0.99980159, 1.00019845, 0.99880929, 0.00714564),
    8: (80.09108610, 0.99997520, 1.00002480, 0.99982638, 0.00121534),
}

# mu_l, sigma_l^2, mu_d, sigma_d^2
TABLE3 = {
    2: (0.81885148, 2.38703164, 0.71440975, 2.13397882),
    3: (0.93352696, 0.53468588, 0.93318787, 0.53600822),
    4: (0.97869416, 0.15390515, 0.97869416, 0.15390519),
    5: (0.99366804, 0.04335760, 0.99366804, 0.04335760),
    6: (0.99819803, 0.01180985, 0.99819803, 0.01180985),
    7: (0.99950066, 0.00315597, 0.99950066, 0.00315597),
    8: (0.99986404, 0.00083471, 0.99986404, 0.00083471),
}

EXPANSION = [
    ("0.296372049053529075588648642133", "1.192674341213466032221288982529"),
    ("0.119736335383631653495068548958", "0.643427418149500070120570319004"),
    ("0.0174783635210388007053516435961", "-0.518397773899337772862672117799"),
]


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _ulp(printed: str) -> F:
    decimals = len(printed.split(".")[1]) if "." in printed else 0
    return F(1, 10**decimals)


def _distance(iv: Interval, x: F) -> F:
    if iv.lo <= x <= iv.hi:
        return F(0)
    return min(abs(iv.lo - x), abs(iv.hi - x))


def test_c01_sequence_prefix():
    buf = io.StringIO()
    start = time.perf_counter()
    with redirect_stdout(buf):
        code = main(["count", "--base", "2", "--upto", "10"])
    elapsed = time.perf_counter() - start
    values = json.loads(buf.getvalue())["results"]["q"]
    ok = code == 0 and values == SEQUENCE and elapsed < 1
    report(1, "count --base 2 --upto 10", ok, f"{values} in {elapsed:.3f}s (limit 1s)")


def test_c02_oracle_equivalence():
    start = time.perf_counter()
    cases = [(2, m) for m in range(9)] + [(3, m) for m in range(5)]
    bad = [(b, m) for b, m in cases if q(b, m) != brute_force_q(b, m)]
    elapsed = time.perf_counter() - start
    report(2, "recursion vs enumeration", not bad and elapsed < 30,
           f"{len(cases)} cases, mismatches {bad}, {elapsed:.2f}s (limit 30s)")


def test_c03_series_coefficients():
    T = list(det_T(2, 6))
    S = list(det_S(2, 6))
    ok = T == [1, -1, F(-1, 2), F(1, 6), F(1, 8), F(3, 40)] and S == [1, 0, F(-5, 12), F(-1, 6), F(-1, 24), F(1, 45)]
    report(3, "det_T(2,6) and det_S(2,6)", ok, f"T={[str(c) for c in T]} S={[str(c) for c in S]}")


def test_c04_certified_pole():
    start = time.perf_counter()
    p = certified_constants(2, 60, R=F(3, 2))
    elapsed = time.perf_counter() - start
    rho_dec, gamma_dec = shared_decimal(p.rho), shared_decimal(p.gamma)
    checks = {
        "one zero in |x|<3/2": p.zero_count_inside_R == 1,
        "rho width <= 1e-9": p.rho.width <= F(1, 10**9),
        "rho digits 0.83845184342": rho_dec.startswith("0.83845184342"),
        "gamma 12 digits 1.19267434121": gamma_dec.startswith("1.19267434121"),
        "gamma consistent with 1.192674341213466": _distance(p.gamma, F("1.192674341213466")) < F(1, 10**15),
        "time < 120s": elapsed < 120,
    }
    failed = [k for k, v in checks.items() if not v]
    report(4, "certified dominant pole, base 2", not failed,
           f"rho={rho_dec} (width {float(p.rho.width):.2e}), gamma={gamma_dec}, zeros={p.zero_count_inside_R}, "
           f"{elapsed:.1f}s; failed={failed}")


def test_c05_alpha_gamma_all_bases():
    start = time.perf_counter()
    failed, rounded = [], []
    for b, (alpha_s, gamma_s) in TABLE1.items():
        p = certified_constants(b, 60)
        for name, iv, printed in (("alpha", p.alpha, alpha_s), ("gamma", p.gamma, gamma_s)):
            x = F(printed)
            # a printed value is consistent if the enclosure lies within one unit of its last digit
            if _distance(iv, x) >= _ulp(printed):
                failed.append(f"{name}_{b}={printed} vs {shared_decimal(iv)}")
            elif not (x <= iv.lo and iv.hi < x + _ulp(printed)):
                rounded.append(f"{name}_{b}")
    elapsed = time.perf_counter() - start
    ok = not failed and elapsed < 600
    report(5, "certified alpha, gamma for b=2..8", ok,
           f"all within one unit of the last printed digit; printed rounded (not truncated): {rounded}; "
           f"{elapsed:.1f}s (limit 600s); failed={failed}")


def test_c06_bound_anchors():
    e = coeff_bound_explicit(2, 60)
    r = coeff_bound_refined(2, 60)
    t86 = tail_bound(2, 60, 1, 86)
    tnone = tail_bound(2, 60, 1, None)
    unsound = []
    for b in (2, 3, 4):
        T = det_T(b, 41)
        for n in range(1, 41):
            if not (abs(T[n]) <= coeff_bound_refined(b, n).hi and abs(T[n]) <= coeff_bound_explicit(b, n).hi):
                unsound.append((b, n))
    checks = {
        "explicit in [1e-4,2e-4]": F(1, 10**4) <= e.hi <= F(2, 10**4),
        "refined <= 6.0e-14": r.hi <= F(6, 10**14),
        "tail(M=86) <= 8.6e-14": t86.hi <= F(86, 10**15),
        "tail(none) <= 1.1e-3": tnone.hi <= F(11, 10**4),
        "soundness n<=40": not unsound,
    }
    failed = [k for k, v in checks.items() if not v]
    report(6, "coefficient and tail bounds", not failed,
           f"explicit={float(e.hi):.4e} refined={float(r.hi):.4e} tail86={float(t86.hi):.4e} "
           f"tail={float(tnone.hi):.4e}; unsound={unsound}; failed={failed}")


def test_c07_max_reps_constants():
    start = time.perf_counter()
    worst, failed = 0.0, []
    for b, row in TABLE2.items():
        theta, nu = theta_nu(b, 60)
        lam, mu, s2 = max_reps_constants(b, 60)
        for name, val, ref in zip(("lambda", "theta", "nu", "mu", "sigma2"), (lam, theta, nu, mu, s2), row):
            err = abs(float(val) - ref)
            worst = max(worst, err)
            if err > 1e-6:
                failed.append(f"{name}_{b}: {float(val):.8f} vs {ref}")
    elapsed = time.perf_counter() - start
    report(7, "theta, nu, lambda, mu, sigma2 for b=2..8", not failed and elapsed < 60,
           f"max abs error {worst:.2e} (tol 1e-6), {elapsed:.1f}s (limit 60s); failed={failed}")


def test_c08_parameter_constants():
    start = time.perf_counter()
    worst_mu, failed = 0.0, []
    for b, row in TABLE3.items():
        mu_l, s_l = param_constants(b, 40, "largest")
        mu_d, s_d = param_constants(b, 40, "distinct")
        for name, val, ref in zip(("mu_l", "sigma2_l", "mu_d", "sigma2_d"), (mu_l, s_l, mu_d, s_d), row):
            err = abs(float(val) - ref)
            if name.startswith("mu"):
                worst_mu = max(worst_mu, err)
            if err > 1e-6:
                failed.append(f"{name}_{b}: {float(val):.8f} vs {ref}")
    elapsed = time.perf_counter() - start
    report(8, "mu, sigma2 of largest exponent and distinct parts for b=2..8", not failed and elapsed < 300,
           f"means max abs error {worst_mu:.2e}; {len(failed)} mismatches (tol 1e-6): {failed}; "
           f"{elapsed:.1f}s (limit 300s)")


def test_c09_max_reps_upper_bound():
    _, nu = theta_nu(2, 60)
    bad = [n for n in range(1, 41) if F(max_reps(2, n)[0], factorial(n)) > nu**n]
    report(9, "M_2(n)/n! <= nu^n for n <= 40", not bad, f"nu={float(nu):.8f}, violations={bad}")


def test_c10_expansion():
    terms = expansion_terms(2, 60, 3)
    digits_ok = all(
        abs(a - F(ra)) < F(1, 10**10) * abs(F(ra)) and abs(b - F(rb)) < F(1, 10**10) * abs(F(rb))
        for (a, b), (ra, rb) in zip(terms, EXPANSION)
    )
    m = 20
    exact = F(q(2, m), factorial(m + 1))
    rel = abs(sum(a * b**m for a, b in terms) - exact) / exact
    report(10, "three-term expansion, base 2", digits_ok and rel < F(1, 10**6),
           f"10-digit agreement={digits_ok}, reconstruction rel error at m=20 {float(rel):.2e} (tol 1e-6)")


def _random_interval(rng):
    a, b = sorted(F(rng.randint(-5000, 5000), rng.randint(1, 100)) for _ in range(2))
    return Interval(a, b)


def test_c11_property_suites():
    failures = []
    # truncation stability under block enlargement
    for b in (2, 3):
        for n in range(1, 13):
            if det_T(b, n + 1, block=n)[n] != det_T(b, n + 1, block=n + 5)[n]:
                failures.append(f"stability b={b} n={n}")
    # Q T == T + (x / b!) S to order 40
    for b in (2, 3):
        N = 40
        table = weight_table(b, N - 1)
        Q = Series([table.total(m) for m in range(N)])
        S = det_S(b, N)
        xS = Series([0] + [c / factorial(b) for c in S.coeffs[:-1]])
        if Q * det_T(b, N) != det_T(b, N) + xS:
            failures.append(f"identity b={b}")
    # inclusion monotonicity on randomized pairs
    rng = random.Random(20240611)
    for _ in range(1000):
        I, J = _random_interval(rng), _random_interval(rng)
        I2 = Interval(I.lo - F(rng.randint(0, 9), 7), I.hi + F(rng.randint(0, 9), 7))
        J2 = Interval(J.lo - F(rng.randint(0, 9), 7), J.hi + F(rng.randint(0, 9), 7))
        x = I.lo + (I.hi - I.lo) * F(rng.randint(0, 100), 100)
        y = J.lo + (J.hi - J.lo) * F(rng.randint(0, 100), 100)
        pairs = [(I + J, I2 + J2, x + y), (I - J, I2 - J2, x - y), (I * J, I2 * J2, x * y)]
        if not J2.contains_zero():
            pairs.append((I / J, I2 / J2, x / y))
        for inner, outer, point in pairs:
            if not (inner.contains(point) and inner.subset_of(outer)):
                failures.append(f"interval {I} {J}")
                break
    # exact normalization of every computed distribution
    count = 0
    for b, mmax in ((2, 12), (3, 6), (4, 4)):
        for m in range(mmax + 1):
            for kind in ("largest", "distinct"):
                count += 1
                if sum(param_distribution(b, m, kind).pmf.values()) != 1:
                    failures.append(f"pmf b={b} m={m} {kind}")
    report(11, "property suites", not failures,
           f"stability 24 cases, identity b=2,3 to order 40, 1000 interval pairs, {count} pmfs; failures={failures}")
