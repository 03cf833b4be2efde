from __future__ import annotations

import json
from fractions import Fraction

import pytest
from mpmath import mp, mpc, mpf

from sparsethue.analytic import MahlerMeasure
from sparsethue.audit import (
    SCHEMA_VERSION,
    audit_part2,
    audit_phi_clustering,
    big_number,
    check_hypothesis_thm1,
    check_hypothesis_thm2,
    split_bands,
)
from sparsethue.corpus import CorpusSpec, generate_corpus
from sparsethue.forms import FormError, parse_form
from sparsethue.logscale import LogScaleReal, interval_context
from sparsethue.roots import RootEnclosure


def test_split_bands():
    assert split_bands(1) == [(1, 1)]
    assert split_bands(2) == [(1, 1), (2, 2)]
    assert split_bands(10) == [(1, 3), (4, 10)]


def test_big_number():
    assert big_number(-12345) == "-12345"
    out = big_number(-(10**100))
    assert out["sign"] == -1 and out["log_lo"] <= 100 * 2.302585092994046 <= out["log_hi"] + 1e-12


def test_hypothesis_errors():
    with pytest.raises(ValueError):
        check_hypothesis_thm2(parse_form("x^3 - 2*y^3"), 0)
    with pytest.raises(FormError):
        check_hypothesis_thm1(parse_form("x^2 - 2*x*y + y^2"), 1)
    assert check_hypothesis_thm1(parse_form("x^3 - 2*y^3"), 1) == {"holds": False, "kappa": None}


def test_part2_not_applicable_below_the_height_hypothesis():
    rep = audit_part2(parse_form("x^3 - 2*y^3"), 1)
    assert rep.hypotheses["thm2_height"] is False
    assert rep.passed and rep.notes and not rep.hard
    with pytest.raises(KeyError):
        rep.check("psi_range")


def _measure(log_m: int) -> MahlerMeasure:
    with interval_context(256):
        lo = Fraction(int(mp.floor(mp.exp(log_m))))
        return MahlerMeasure(lo, lo + 1, LogScaleReal.coerce(lo))


def _root(re, im, pair, idx) -> RootEnclosure:
    return RootEnclosure(mpc(re, im), mpf(2) ** -300, im == 0, pair, "x", 512)


def test_phi_clustering_counts_a_constructed_pair():
    # one conjugate pair with |Im| = M^(-1/2) / 2 lies below M^(-phi) exactly for phi <= 1/2 + ln 2 / ln M
    M = _measure(40)
    with mp.workprec(512):
        im = mp.exp(-20) / 2
        roots = [_root(1, 0, None, 0), _root(0, im, 2, 1), _root(0, -im, 1, 2)]
    res, info = audit_phi_clustering(parse_form("x^3 - 2*y^3"), M, roots)
    counts = {row["phi"]: row["count"] + row["undecided"] for row in info["grid"]}
    assert all(counts[k / 16] == 1 for k in range(1, 9))
    assert all(counts[k / 16] == 0 for k in range(9, 17))
    assert res.passed and info["M_gt_e_2n"]


@pytest.fixture(scope="module")
def trinomial_report():
    (it,) = generate_corpus(CorpusSpec("trinomial", (5, 5), 1, 3, (2,), target="thm2"))
    return audit_part2(it.form, it.h, form_id=it.ident)


def test_report_schema(trinomial_report):
    js = trinomial_report.to_json()
    assert js["schema"] == SCHEMA_VERSION and js["theorem"] == 2
    for key in ("invariants", "hypotheses", "census", "hard", "lemmas", "soft", "partial", "details", "violations", "passed"):
        assert key in js
    assert "runtime" not in js and "runtime" in trinomial_report.to_json(include_runtime=True)
    assert json.loads(trinomial_report.dumps()) == js
    assert [b["band"] for b in js["details"]["bands"]] == [[1, 1], [2, 2]]


def test_report_checks_are_named_per_band(trinomial_report):
    names = [c.name for c in trinomial_report.hard]
    assert any(n.startswith("band[1,1]:") for n in names)
    assert "phi_clustering_cap" in names
    assert trinomial_report.passed, trinomial_report.violations


def test_report_is_reproducible(trinomial_report):
    (it,) = generate_corpus(CorpusSpec("trinomial", (5, 5), 1, 3, (2,), target="thm2"))
    assert audit_part2(it.form, it.h, form_id=it.ident).dumps() == trinomial_report.dumps()
