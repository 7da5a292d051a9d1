import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cortho import families
from cortho.core import InsufficientTableError, eval_sequence
from cortho.determinacy import (INCONCLUSIVE, NON_UNIQUE, UNIQUE, auto_test_point,
                                classify_determinacy, log_partial_mass, partial_mass)
from cortho.structure import DecompositionError, ThreeTermForm, form_table

from conftest import ROT_A, ROT_B


def direct_mass(table, z, n):
    """Oracle: S_N summed straight from the recurrence values."""
    return float(np.sum(np.abs(eval_sequence(table, z, n)) ** 2))


def test_first_partial_sum_is_one():
    assert partial_mass(families.hermite(5), 3 + 4j, 1) == 1.0


@pytest.mark.parametrize("z", [0.3, 1j, 2 - 0.5j])
def test_partial_mass_matches_direct_sum(z):
    t = families.rotated_hermite(30, a=ROT_A, b=ROT_B)
    assert partial_mass(t, z, 25) == pytest.approx(direct_mass(t, z, 25), rel=1e-12)


def test_chebyshev_on_and_off_interval():
    t = families.chebyshev(25)
    # off the line the sum grows geometrically
    assert partial_mass(t, 1j, 20) >= 1e3
    # at z = 0: P_n(0) alternates between 0 and +-sqrt(2) from n = 1, so S_20 = 1 + 9 * 2
    assert partial_mass(t, 0.0, 20) == pytest.approx(19.0, abs=1e-12)


def test_log_mass_survives_overflow():
    t = families.chebyshev(1200)
    lg = log_partial_mass(t, 10j, 1200)
    assert math.isfinite(lg) and lg > 709
    assert partial_mass(t, 10j, 1200) == math.inf
    # the rescaled log agrees with the direct sum where the latter is representable
    lg_short = log_partial_mass(t, 10j, 100)
    assert lg_short == pytest.approx(math.log(direct_mass(t, 10j, 100)), rel=1e-12)


def test_partial_mass_bounds():
    t = families.chebyshev(10)
    with pytest.raises(ValueError):
        partial_mass(t, 1j, 0)
    with pytest.raises(InsufficientTableError):
        partial_mass(t, 1j, 12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-math.pi, math.pi), st.floats(0.05, 3))
def test_partial_sums_are_monotone(seed, angle, r):
    rng = np.random.default_rng(seed)
    t = families.rotated(families.random_symmetric_form(rng, 40), cmath.exp(1j * angle), 0.5)
    table = form_table(t)
    z = 0.5 + cmath.exp(1j * angle) * (0.2 + 1j * r)
    sums = [log_partial_mass(table, z, n) for n in range(1, 41)]
    assert np.all(np.diff(sums) >= 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-math.pi, math.pi),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_affine_covariance(seed, angle, b):
    # S_N of the rotated family at b + a t equals S_N of the symmetric family at t
    rng = np.random.default_rng(seed)
    base = families.random_symmetric_form(rng, 30)
    a = cmath.exp(1j * angle)
    t = 0.3 + 0.8j
    lhs = log_partial_mass(form_table(families.rotated(base, a, b)), b + a * t, 30)
    rhs = log_partial_mass(form_table(base), t, 30)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("name", ["chebyshev", "hermite"])
def test_classical_families_are_unique(name):
    rep = classify_determinacy(families.make(name, 200))
    assert rep.verdict == UNIQUE
    assert all(r >= 4 for r in rep.ratios)
    assert rep.off_line_distance == pytest.approx(1.0)
    assert rep.growth_rate > 0


def test_verdict_is_gauge_and_branch_invariant():
    base = classify_determinacy(families.hermite(200))
    for a in (ROT_A, -ROT_A, 1j, cmath.exp(2.9j)):
        rep = classify_determinacy(families.rotated_hermite(200, a=a, b=ROT_B))
        assert rep.verdict == base.verdict
        np.testing.assert_allclose(rep.log_partial_sums, base.log_partial_sums, rtol=1e-9)


def test_accepts_a_form():
    rep = classify_determinacy(families.chebyshev_form(200))
    assert rep.verdict == UNIQUE
    assert rep.test_point == auto_test_point(families.chebyshev_form(200))


@pytest.mark.parametrize("z", [0.3, -1.7, 5.0])
def test_on_line_points_are_inconclusive(z):
    rep = classify_determinacy(families.chebyshev(200), z=z)
    assert rep.verdict == INCONCLUSIVE
    assert "line" in rep.reason
    assert rep.log_partial_sums == ()


def test_on_line_detection_for_rotated_line():
    t = families.rotated_chebyshev(200, a=ROT_A, b=ROT_B)
    rep = classify_determinacy(t, z=ROT_B + ROT_A * 0.4)
    assert rep.verdict == INCONCLUSIVE and rep.off_line_distance <= 1e-8
    rep = classify_determinacy(t, z=ROT_B + ROT_A * (0.4 + 1e-3j))
    assert "line" not in rep.reason
    assert rep.off_line_distance == pytest.approx(1e-3, rel=1e-6)


def test_fast_growth_exhibit_stabilizes():
    rep = classify_determinacy(families.fast_growth(200))
    assert rep.verdict == NON_UNIQUE
    assert rep.ratios[-1] - 1 <= 1e-6


def test_insufficient_rows():
    with pytest.raises(InsufficientTableError):
        classify_determinacy(families.chebyshev(100))
    with pytest.raises(InsufficientTableError):
        classify_determinacy(families.chebyshev_form(50))


def test_schedule_validation():
    with pytest.raises(ValueError):
        classify_determinacy(families.chebyshev(50), schedule=(20,))
    with pytest.raises(ValueError):
        classify_determinacy(families.chebyshev(50), schedule=(20, 10))


def test_mild_growth_is_inconclusive():
    # c_n = (n+1)^2: sum 1/c_n converges but S_N has not settled by N = 200
    rep = classify_determinacy(families.fast_growth(200, power=2.0))
    assert rep.verdict == INCONCLUSIVE


def test_report_serializes():
    d = classify_determinacy(families.chebyshev(200)).to_dict()
    assert d["verdict"] == UNIQUE
    assert len(d["partial_sums"]) == len(d["schedule"]) == 4
    assert "caveat" in d


def test_decompose_failure_propagates():
    with pytest.raises(DecompositionError):
        classify_determinacy(families.monomial(200))


def test_custom_point_and_threshold():
    form = ThreeTermForm(b=0, a=1, c=[1.0] * 210, d=[0.0] * 210)
    rep = classify_determinacy(form, z=2j, ratio_threshold=1e300)
    assert rep.verdict == INCONCLUSIVE
    assert rep.test_point == 2j
