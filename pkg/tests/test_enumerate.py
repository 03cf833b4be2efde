from __future__ import annotations

import csv
import io
from fractions import Fraction

import pytest

from sparsethue.corpus import CorpusSpec, generate_corpus
from sparsethue.enumerate import (
    CSV_HEADER,
    SearchStats,
    convergents,
    crossover,
    enumerate_box,
    enumerate_convergents,
    enumerate_hybrid,
    enumerate_region,
    enumerate_strip,
    point_set,
)
from sparsethue.forms import parse_form

F3 = parse_form("x^3 - 2*y^3")


def _brute(F, a, b, box):
    from math import gcd

    out = set()
    for y in range(0, box + 1):
        for x in range(-box, box + 1):
            if gcd(x, y) != 1 or (y == 0 and x < 0):
                continue
            if a <= abs(F(x, y)) <= b:
                out.add((x, y))
    return out


def test_box_examples():
    assert point_set(enumerate_box(F3, 1, 1, 100)) == {(1, 0), (1, 1)}
    assert point_set(enumerate_box(F3, 1, 1, 0)) == set()


@pytest.mark.parametrize("text, b", [("x^3 - 2*y^3", 6), ("x^4 + x*y^3 - 3*y^4", 20), ("2*x^5 - 3*x^2*y^3 + y^5", 40)])
def test_box_matches_brute_force(text, b):
    F = parse_form(text)
    stats = SearchStats()
    assert point_set(enumerate_box(F, 1, b, 60, stats=stats)) == _brute(F, 1, b, 60)
    assert stats.points > 0


def test_band_excludes_small_values():
    pts = point_set(enumerate_box(F3, 2, 6, 60))
    assert all(2 <= abs(F3(x, y)) <= 6 for x, y in pts)
    assert (1, 1) not in pts


def test_continued_fraction_convergents():
    assert (5, 4) in convergents(Fraction(5, 4), 10)
    assert convergents(Fraction(355, 113), 200)[-1] == (355, 113)


def test_convergent_route_finds_5_4():
    found = point_set(enumerate_convergents(F3, 1, 3, 10))
    assert (5, 4) in found and F3(5, 4) == -3


def test_hybrid_agrees_with_box_and_finds_planted_solutions():
    for it in generate_corpus(CorpusSpec("binomial", (3, 5), 6, 12, (1,), target="thm2")):
        c = int(it.params["c"])
        hybrid, cx = enumerate_hybrid(it.form, 1, it.h, 2000)
        assert point_set(hybrid) == point_set(enumerate_box(it.form, 1, it.h, 2000))
        assert (c, 1) in point_set(hybrid)
        assert cx.height >= 0


def test_strip_and_region():
    F = parse_form("x^3 + x*y^2 - 7*y^3")
    strip = point_set(enumerate_strip(F, 1, 10, 1, 50))
    assert strip == {p for p in _brute(F, 1, 10, 400) if 1 <= p[1] <= 50}
    reg = enumerate_region(F, 1, 10, 1, 50)
    assert reg.complete and point_set(reg.solutions) == strip


def test_crossover_grows_with_b():
    assert crossover(F3, 100).height >= crossover(F3, 1).height


def test_records_serialize():
    recs = enumerate_box(F3, 1, 6, 50)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    w.writerows(r.csv_row() for r in recs)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == CSV_HEADER and len(rows) == len(recs) + 1
    js = recs[0].to_json()
    assert int(js["value"]) == abs(F3(int(js["x"]), int(js["y"])))
