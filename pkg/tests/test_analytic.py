from __future__ import annotations

from fractions import Fraction

import pytest
from mpmath import iv, mp, mpc, mpf

from sparsethue.analytic import (
    check_mahler_bounds,
    denominator_thm1,
    hypothesis_thm1,
    hypothesis_thm2,
    kappa_condition,
    lambda_interval,
    mahler_measure,
    medium_levels,
    phi_of_imag,
    phi_profile,
    select_kappa,
    threshold_R,
    thresholds_part2,
)
from sparsethue.forms import parse_form
from sparsethue.logscale import Inconclusive, LogScaleReal, ends, interval_context
from sparsethue.resultants import DiscriminantValue, discriminant
from sparsethue.roots import RootEnclosure

EPS = Fraction(1, 10**20)


@pytest.mark.parametrize(
    "text, value",
    [
        ("x^3 - 2*y^3", Fraction(2)),
        ("5*x^3 - y^3", Fraction(5)),
        ("x^4 + 3*y^4", Fraction(3)),
    ],
)
def test_mahler_exact_values(text, value):
    M = mahler_measure(parse_form(text))
    assert value - EPS <= M.lower <= M.upper <= value + EPS


def test_mahler_golden_ratio():
    M = mahler_measure(parse_form("x^2 - x*y - y^2"))
    with mp.workprec(200):
        phi = (1 + mp.sqrt(5)) / 2
        assert abs(mp.mpf(M.lower.numerator) / M.lower.denominator - phi) < mpf(10) ** -20
        assert abs(mp.mpf(M.upper.numerator) / M.upper.denominator - phi) < mpf(10) ** -20


def test_mahler_ignores_powers_of_x_and_y():
    a = mahler_measure(parse_form("x^2*y^2 - 2*y^4"))
    b = mahler_measure(parse_form("x^2 - 2*y^2"))
    assert a.lower == b.lower and a.upper == b.upper


def test_mahler_bounds_report():
    rep = check_mahler_bounds(parse_form("x^5 + x^2*y^3 + y^5"))
    assert rep.all_hold
    with pytest.raises(ValueError):
        check_mahler_bounds(parse_form("x^2 - 2*x*y + y^2"))


@pytest.mark.parametrize("n, lnR", [(2, 266.42), (3, 1060.76), (10, 9766.4)])
def test_threshold_R(n, lnR):
    lo, hi = ends(threshold_R(n).log)
    assert abs(float(lo) - lnR) < 0.06 and hi - lo < 1e-30


def test_lambda_n8():
    lo, hi = ends(lambda_interval(8))
    assert abs(float(lo) - 4.0817) < 1e-4 and hi - lo < 1e-30


def test_medium_levels():
    assert medium_levels(9, 3) == 2 and medium_levels(100, 1) == 2
    assert medium_levels(13, 4) is None
    # s = 8, n = 40: 8^(1/N) <= 5/4 first holds at N = 10 (1.25^9 < 8 <= 1.25^10)
    assert medium_levels(40, 8) == 10
    assert medium_levels(20, 4) == 2


def test_thresholds_part2_cube_root_two():
    th = thresholds_part2(parse_form("x^3 - 2*y^3"), 1)
    assert th.Q.ge(Fraction(2) - EPS) is True and th.Q.le(Fraction(2) + EPS) is True
    assert th.Y_S_prime.ge(Fraction(4) - EPS) is True and th.Y_S_prime.le(Fraction(4) + EPS) is True
    assert th.Y_S_prime_upper == 5 or th.Y_S_prime_upper == 4
    assert not th.height_hypothesis and not th.M_gt_e_2n


def test_thm2_hypothesis_boundary():
    # x^5 - b y^5 at h = 1: |D| = 5^5 b^4 against 10^80 5^5, so the boundary is b = 10^20
    for b, expected in ((10**20, False), (10**20 + 1, True)):
        D = discriminant(parse_form(f"x^5 - {b}*y^5"))
        assert hypothesis_thm2(D, 1, 5) is expected


def test_select_kappa_constructed():
    # t = ln(h * denominator) / ln|D| between 1/18 and 1/17.6 puts the least kappa at 5 for n = 5
    n, s, h = 5, 1, 1
    with interval_context():
        ln_den = float(ends(denominator_thm1(n, s).log)[0])
    k = round(17.8 * ln_den / float(mp.log(10)))
    D = DiscriminantValue(10**k)
    assert hypothesis_thm1(D, h, n, s)
    assert select_kappa(D, h, n, s) == 5
    assert kappa_condition(D, h, n, s, 5) and not kappa_condition(D, h, n, s, 4)
    assert select_kappa(D, h, n, s, kappa_max=4) is None
    assert select_kappa(DiscriminantValue(10**20), h, n, s) is None


def test_phi_examples():
    with interval_context(256):
        assert phi_of_imag(mpf(2), mpf(2), iv.mpf(10)).hi == 0
        v = phi_of_imag(mp.exp(-5), mp.exp(-5), iv.mpf(10))
    assert abs(v.lo - mpf(0.5)) < 1e-20 and abs(v.hi - mpf(0.5)) < 1e-20
    assert phi_of_imag(mpf(0), mpf(0), iv.mpf(10)).is_infinite
    with pytest.raises(Inconclusive):
        phi_of_imag(mpf("0.9"), mpf("1.1"), iv.mpf(10))


def test_phi_profile_min1_sum():
    roots = [
        RootEnclosure(mpc(1, 0), mpf(2) ** -200, True, None),
        RootEnclosure(mpc(0, mp.exp(-20)), mpf(2) ** -200, False, 2),
        RootEnclosure(mpc(0, -mp.exp(-20)), mpf(2) ** -200, False, 1),
    ]
    with interval_context():
        prof = phi_profile(roots, LogScaleReal.from_log(iv.mpf(10)))
    assert prof.phis[0].is_infinite
    lo, hi = prof.min1_sum
    assert 3 - 1e-20 <= lo <= hi <= 3 + 1e-20
