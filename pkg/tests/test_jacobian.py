import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from sepvol import jacobian as jb
from sepvol.series import TruncatedSeries


@pytest.fixture(scope="module", params=jb.CASES)
def ev(request):
    return jb.JacobianEvaluator(request.param)


def test_series_arithmetic():
    t = TruncatedSeries([0, 1], 6)
    assert ((1 + t) * (1 - t)).coeffs == [1, 0, -1, 0, 0, 0]
    inv = TruncatedSeries([1, -1], 6).reciprocal()
    assert inv.coeffs == [1] * 6
    assert TruncatedSeries.log1p(4).coeffs == [0, 1, Fraction(-1, 2), Fraction(1, 3)]
    b = TruncatedSeries.binomial(Fraction(1, 2), -2, 4)
    assert b.coeffs == [1, -1, Fraction(3, 4), Fraction(-1, 2)]
    q, rem = TruncatedSeries([0, 0, 3, 4], 4).divide_by_power(2)
    assert rem == [0, 0] and q.coeffs == [3, 4]
    assert (t**3).coeffs == [0, 0, 0, 1, 0, 0]
    with pytest.raises(ZeroDivisionError):
        t.reciprocal()


def test_remainders_vanish_exactly():
    assert all(c == 0 for c in jb.series_remainder("real", 100)) and len(jb.series_remainder("real")) == 9
    assert all(c == 0 for c in jb.series_remainder("complex", 100)) and len(jb.series_remainder("complex")) == 15


def test_series_degree_floor():
    with pytest.raises(ValueError):
        jb.series_about_one("real", 10)


def test_series_matches_extended_precision(ev):
    with mpmath.workdps(60):
        mu = mpmath.mpf(9) / 10
        rel = abs(ev.series_mp(mu, 60) / jb.closed_form_mp(ev.case, mu, 60) - 1)
    assert rel < 1e-20


def test_value_at_one_is_the_limit(ev):
    with mpmath.workdps(200):
        mu = 1 - mpmath.mpf(10) ** -8
        limit = jb.closed_form_mp(ev.case, mu, 200)
        assert abs(ev.series_mp(mu, 200) / limit - 1) < mpmath.mpf(10) ** -40
        c0 = mpmath.mpf(ev.coeffs[0].numerator) / ev.coeffs[0].denominator
        assert abs(c0 / limit - 1) < 1e-7
    assert ev(1.0) == pytest.approx(float(ev.coeffs[0]), rel=1e-15)


def test_real_half_matches_hand_expansion():
    mu = 0.5
    num = (1 / 16) * (
        12 * ((9 / 4) * (1 / 16 + 14 / 4 + 8) * (1 / 4) + 1) * math.log(0.5)
        - 5 * (5 / 256 + 32 / 64 - 32 / 4 - 5)
    )
    hand = num / (1890 * (-3 / 4) ** 9)
    with mpmath.workdps(40):
        oracle = float(jb.closed_form_mp("real", mpmath.mpf(1) / 2, 40))
    assert hand > 0
    assert jb.JacobianEvaluator("real")(mu) == pytest.approx(oracle, rel=1e-14)
    assert hand == pytest.approx(oracle, rel=1e-11)


def test_vanishes_at_zero():
    ev = jb.JacobianEvaluator("real")
    assert ev(1e-6) < 1e-22
    assert jb.JacobianEvaluator("complex")(1e-6) < 1e-40


def test_continuity_at_switch(ev):
    sp = ev.switch_point
    assert abs(jb.closed_form(ev.case, sp) / ev.series(sp) - 1) < 1e-12


def test_overlap_band_agreement(ev):
    mu = np.linspace(0.90, 0.95, 51)
    assert np.all(np.abs(jb.closed_form(ev.case, mu) / ev.series(mu) - 1) < 1e-12)


def test_positive_and_decreasing_near_one(ev):
    mu = np.linspace(1e-6, 1 - 1e-6, 20001)
    assert np.all(ev(mu) > 0)
    tail = ev(np.linspace(0.95, 1.0, 2001))
    assert np.all(np.diff(tail) < 0)


def test_domain(ev):
    for bad in (0.0, -0.5, 1.0001):
        with pytest.raises(ValueError):
            ev(bad)
    with pytest.raises(ValueError):
        jb.JacobianEvaluator("qutrit")


@pytest.mark.parametrize("case, expected", [("real", math.pi**2 / 2293760), ("complex", 1 / 2018016000)])
def test_integral_check(case, expected):
    assert jb.integral_check(case) == pytest.approx(expected, rel=1e-10)
    # reported decimal values
    assert expected == pytest.approx({"real": 4.30281e-6, "complex": 4.95536e-10}[case], rel=1e-5)


def test_integral_empty_range():
    assert jb.integral_check("real", 0.3, 0.3) == 0.0


def test_integral_is_additive():
    whole = jb.integral_check("complex")
    parts = jb.integral_check("complex", 0, 0.7) + jb.integral_check("complex", 0.7, 1)
    assert parts == pytest.approx(whole, rel=1e-10)


def test_naive_evaluation_shows_spurious_zeros():
    real = jb.naive_sign_changes("real")
    cplx = jb.naive_sign_changes("complex")
    assert len(real) > 0 and 0.95 < real[0] < 0.99
    assert len(cplx) > 0 and 0.8 < cplx[0] < 0.9
    # the stable evaluator is positive at the same places
    assert np.all(jb.JacobianEvaluator("real")(real) > 0)
    assert np.all(jb.JacobianEvaluator("complex")(cplx) > 0)
