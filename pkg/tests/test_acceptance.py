"""Acceptance criteria AC1-AC10, each at its stated tolerance.

Every test reports through ``conftest.record``; the terminal summary prints one
``[PASS]`` / ``[FAIL]`` line per criterion.
"""
import cmath
import math
from fractions import Fraction

import numpy as np

from cortho import families
from cortho.core import RecurrenceTable, eval_sequence
from cortho.determinacy import INCONCLUSIVE, UNIQUE, classify_determinacy
from cortho.spectral import gauss_measure, truncate_jacobi, verify_orthonormality
from cortho.structure import (check_formal_normality, decompose, form_table, three_term_view,
                              verify_normality_relations)

from conftest import bundled, bundled_decomposable, record
from test_spectral import bisection_eigenvalues


def max_row_error(t1: RecurrenceTable, t2: RecurrenceTable) -> float:
    if t1.num_rows != t2.num_rows:
        return math.inf
    return max(abs(t1.coefficient(i, n) - t2.coefficient(i, n))
               for n in range(t1.num_rows) for i in range(n + 2))


# exact complex rational arithmetic on (re, im) pairs, for the AC10 oracle
def _q(z):
    z = complex(z)
    return Fraction(z.real), Fraction(z.imag)


def _mul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _div(a, b):
    d = b[0] * b[0] + b[1] * b[1]
    return _mul(a, (b[0] / d, -b[1] / d))


def exact_values(table, lam, count):
    """P_0(lam) .. P_{count-1}(lam) computed exactly from the (float) table entries."""
    lam = _q(lam)
    P = [(Fraction(1), Fraction(0))]
    for n in range(count - 1):
        r, row = table.firsts[n], table.coeffs[n]
        acc = _mul(lam, P[n])
        for i, c in enumerate(row[:-1]):
            t = _mul(_q(c), P[r + i])
            acc = (acc[0] - t[0], acc[1] - t[1])
        P.append(_div(acc, _q(row[-1])))
    return P


# ---------------------------------------------------------------------------

def test_ac1_monomial_rejection():
    res = check_formal_normality(families.monomial(40))
    ok = (not res.formally_normal and res.first_violation == (0, 0)
          and abs(res.first_violation_residual - 1.0) <= 1e-14)
    record("AC1 monomial rejection", ok,
           f"residual {res.first_violation_residual!r} at {res.first_violation}")


def test_ac2_scaled_monomial_rejection():
    t = families.scaled_monomial(40)
    res = check_formal_normality(t)
    # direct oracle: |(D*D - DD*)[0, 0]| = |sum_k |d_k0|^2 - sum_k |d_0k|^2|
    # = ||d_10|^2 - |d_01|^2|, with d_00 = d_01 = 0 and d_10 = 1/2 for 1, 2z, z^2, 2z^3, ...
    oracle = abs(abs(t.coefficient(1, 0)) ** 2 - abs(t.coefficient(0, 1)) ** 2)
    ok = (not res.formally_normal and res.first_violation == (0, 0)
          and abs(res.first_violation_residual - 0.25) <= 1e-14
          and abs(oracle - 0.25) <= 1e-14)
    record("AC2 scaled-monomial rejection", ok,
           f"residual {res.first_violation_residual!r} at {res.first_violation} "
           f"(direct |d_10|^2 = {oracle!r}; largest entry {res.max_residual:g} "
           f"at {res.worst_entry})")


def test_ac3_decomposition_round_trip():
    rng = np.random.default_rng(31)
    worst_a = worst_b = worst_rows = 0.0
    for _ in range(50):
        base = families.random_symmetric_form(rng, 30)
        a0 = cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        b0 = 3 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
        table = form_table(families.rotated(base, a0, b0))
        form = decompose(table)
        # principal branch of sqrt(a0^2): arg in (-pi/2, pi/2]
        phi = cmath.phase(a0)
        a_exp = a0 if -math.pi / 2 < phi <= math.pi / 2 else -a0
        # canonical gauge puts d_0 = 0, which moves b along the line by a0 d_0
        b_exp = b0 + a0 * base.d[0]
        worst_a = max(worst_a, abs(form.a - a_exp))
        worst_b = max(worst_b, abs(form.b - b_exp))
        worst_rows = max(worst_rows, max_row_error(form_table(form), table))
    ok = worst_a <= 1e-10 and worst_b <= 1e-10 and worst_rows <= 1e-12
    record("AC3 decomposition round-trip", ok,
           f"50 families: max |a err| {worst_a:.2e}, |b err| {worst_b:.2e}, "
           f"row reconstruction {worst_rows:.2e}")


def test_ac4_relation_suite():
    worst = {k: verify_normality_relations(t).max() for k, t in bundled_decomposable(40).items()}
    f, g, h = three_term_view(families.chebyshev(40))
    g = g.copy()
    g[1] += 0.1j
    rows = [(0, (g[0], h[0]))] + [(n - 1, (f[n], g[n], h[n])) for n in range(1, 40)]
    detected = verify_normality_relations(RecurrenceTable.from_rows(rows)).max()
    ok = max(worst.values()) <= 1e-12 and detected >= 0.05
    record("AC4 relation suite", ok,
           f"max residual {max(worst.values()):.2e} over {sorted(worst)}; "
           f"perturbed g_1 residual {detected:.3g}")


def test_ac5_gauss_exactness():
    details, ok = [], True
    for name, t in [("chebyshev", families.chebyshev(41)),
                    ("rotated-hermite", bundled(41)["rotated-hermite"])]:
        form = decompose(t)
        mu = gauss_measure(form, 40)
        gram = verify_orthonormality(t, mu, 40)           # m, n <= 39
        # the remaining degree sums up to 79 pair P_40 with P_0 .. P_39
        P = eval_sequence(t, np.array(mu.nodes), 41)
        w = np.array(mu.weights)
        edge = max(abs(np.sum(w * P[40] * np.conj(P[n]))) for n in range(40))
        ok &= gram <= 1e-9 and edge <= 1e-9
        details.append(f"{name} {max(gram, edge):.2e}")
    record("AC5 Gauss exactness", ok, "N = 40, m + n <= 79: " + ", ".join(details))


def test_ac6_chebyshev_closed_form():
    mu = gauss_measure(families.chebyshev_form(8), 8)
    k = np.arange(1, 9)
    closed = np.sort(np.cos((2 * k - 1) * np.pi / 16))
    T = truncate_jacobi(families.chebyshev_form(8), 8)
    bisect = bisection_eigenvalues(T.diag, T.offdiag)
    node_err = np.max(np.abs(np.array(mu.nodes) - closed))
    weight_err = np.max(np.abs(np.array(mu.weights) - 1 / 8))
    bisect_err = np.max(np.abs(bisect - closed))
    ok = node_err <= 1e-10 and weight_err <= 1e-10 and bisect_err <= 1e-10
    record("AC6 Chebyshev closed form", ok,
           f"nodes {node_err:.2e}, weights {weight_err:.2e}, bisection oracle {bisect_err:.2e}")


def test_ac7_support_on_line():
    rng = np.random.default_rng(7)
    cases = [(k, decompose(t)) for k, t in bundled_decomposable(41).items()]
    for i in range(20):
        base = families.random_symmetric_form(rng, 41)
        cases.append((f"random-{i}", decompose(form_table(families.rotated(
            base, cmath.exp(1j * rng.uniform(-math.pi, math.pi)), complex(*rng.normal(size=2)))))))
    worst, count = 0.0, 0
    for _, form in cases:
        for N in (1, 2, 5, 10, 20, 40):
            x = np.array(gauss_measure(form, N).nodes)
            worst = max(worst, np.max(np.abs((np.conj(form.a) * (x - form.b)).imag)))
            count += 1
    record("AC7 support on line", worst <= 1e-10,
           f"{count} measures, max |Im(conj(a)(x - b))| = {worst:.2e}")


def test_ac8_interlacing():
    failures = []
    for name, form in [("chebyshev", families.chebyshev_form(41)),
                       ("hermite", families.hermite_form(41))]:
        for N in range(5, 40):
            x = gauss_measure(form, N).line_parameters
            y = gauss_measure(form, N + 1).line_parameters
            if not (np.all(y[:-1] < x) and np.all(x < y[1:])):
                failures.append((name, N))
    record("AC8 interlacing", not failures,
           "N = 5..39 strict for chebyshev and hermite" if not failures else f"fails {failures}")


def test_ac9_determinacy():
    details, ok = [], True
    for name in ("chebyshev", "hermite"):
        rep = classify_determinacy(families.make(name, 200))
        ok &= rep.verdict == UNIQUE and min(rep.ratios) >= 4
        details.append(f"{name} {rep.verdict} (min S_2N/S_N {min(rep.ratios):.3g})")
        on = classify_determinacy(families.make(name, 200), z=0.5)
        ok &= on.verdict == INCONCLUSIVE and "line" in on.reason
        details.append(f"{name} on-line {on.verdict}")
    record("AC9 determinacy", ok, "; ".join(details))


def test_ac10_evaluation_functional():
    rng = np.random.default_rng(10)
    tables = bundled(20)
    names = sorted(tables)
    worst = 0.0
    for _ in range(200):
        t = tables[names[rng.integers(len(names))]]
        deg = int(rng.integers(0, 16))
        v = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        lam = 2 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
        # <P_n, p> is the n-th coefficient of p in the basis (P_n)
        lhs = np.dot(eval_sequence(t, lam, deg + 1), v)
        P = exact_values(t, lam, deg + 1)
        re = sum(_mul(p, _q(c))[0] for p, c in zip(P, v))
        im = sum(_mul(p, _q(c))[1] for p, c in zip(P, v))
        exact = complex(float(re), float(im))
        worst = max(worst, abs(lhs - exact) / abs(exact))
    record("AC10 evaluation functional", worst <= 1e-10,
           f"200 pairs, max relative error {worst:.2e} against exact rational evaluation")
