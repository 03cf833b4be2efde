from __future__ import annotations

from fractions import Fraction

import pytest
from mpmath import iv, mp, mpf

from sparsethue.logscale import (
    Inconclusive,
    LogScaleReal,
    PrecisionError,
    current_precision,
    interval_context,
    ladder,
    to_fraction,
)


def test_from_int_round_trip():
    for n in (1, 2, 10**50, 3**1000):
        v = LogScaleReal.from_int(n)
        with mp.workprec(512):
            assert v.lo <= mp.log(n) <= v.hi
        assert v.gt(LogScaleReal.zero()) is True
    assert LogScaleReal.from_int(10**50).gt(10**50 - 1) is True
    # a relative gap of 3^-1000 is below the working precision: undecided, not wrong
    assert LogScaleReal.from_int(3**1000).gt(3**1000 - 1) is None


def test_huge_values_without_overflow():
    big = LogScaleReal.from_int(10**15000)
    bigger = big * big
    with interval_context(256):
        assert abs(bigger.log_midpoint() - 30000 * float(mp.log(10))) < 1e-6
    assert bigger.gt(big) is True
    assert (bigger / big).ge(big) is not False


def test_signs_and_arithmetic():
    two, three = LogScaleReal.from_int(2), LogScaleReal.from_int(3)
    assert (two - three).sign == -1
    assert (-two).sign == -1 and abs(-two).sign == 1
    five = two + three
    assert five.ge(5) is not False and five.le(5) is not False
    assert (two**3).gt(7) is True and (two**3).lt(9) is True
    assert LogScaleReal.from_int(64).root(3).gt(3) is True


def test_comparison_is_three_valued():
    a = LogScaleReal.from_int(7)
    assert a.lt(a) is None or a.lt(a) is False
    assert a.certainly_lt(8) and not a.certainly_lt(7)


def test_rejects_empty_enclosure():
    with pytest.raises(ValueError):
        LogScaleReal(1, mpf(2), mpf(1))
    with pytest.raises(ValueError):
        LogScaleReal(2, mpf(0), mpf(0))


def test_rational_values():
    q = LogScaleReal.from_rational(Fraction(1, 3))
    assert q.lt(Fraction(1, 2)) is True and q.gt(Fraction(1, 4)) is True


def test_to_fraction_keeps_sign_and_bits():
    with mp.workprec(512):
        x = mpf(2) ** -300 + 1
        assert to_fraction(x) == 1 + Fraction(1, 2**300)
        assert to_fraction(-mpf(3) / 4) == Fraction(-3, 4)


def test_ladder_escalates_until_decided():
    seen = []

    def attempt():
        seen.append(current_precision())
        if current_precision() < 1024:
            raise Inconclusive("too coarse")
        return current_precision()

    assert ladder(attempt) == 1024
    assert seen[:2] == [256, 1024]


def test_ladder_reports_failure():
    def never():
        raise Inconclusive("never")

    with pytest.raises(PrecisionError):
        ladder(never)


def test_interval_context_restores_precision():
    before = iv.prec
    with interval_context(2048):
        assert iv.prec == 2048
    assert iv.prec == before
