from __future__ import annotations

import pytest
from mpmath import mp

from sparsethue.analytic import threshold_R
from sparsethue.forms import FormError, parse_form
from sparsethue.logscale import LogScaleReal
from sparsethue.newton import (
    build_candidate_set,
    cluster_roots,
    newton_polygon,
    newton_polygon_of,
    verify_candidate_property,
)
from sparsethue.roots import certified_roots

LACUNARY = parse_form("x^5 - 10000000000*x^2*y^3 - 1000000000000*y^5")


def test_two_edge_polygon():
    poly = newton_polygon(LACUNARY)
    assert poly.multiplicities == [2, 3]
    assert abs(poly.slopes[0] - mp.log(10)) < 1e-12
    assert abs(poly.slopes[1] - 10 * mp.log(10) / 3) < 1e-12


def test_annuli_hold_the_roots():
    roots = certified_roots(LACUNARY)
    annuli = cluster_roots(newton_polygon(LACUNARY), roots)
    assert [len(a.members) for a in annuli] == [2, 3]
    for ann in annuli:
        assert ann.width_factor < 2


def test_collinear_points_give_one_edge():
    poly = newton_polygon_of([(0, 1), (1, 2), (2, 4)])
    assert poly.multiplicities == [2]


def test_polygon_needs_pure_powers():
    with pytest.raises(FormError):
        newton_polygon(parse_form("x^3*y - 2*y^4"))


def test_full_root_set_has_ratio_one():
    roots = certified_roots(parse_form("x^4 + 3*x*y^3 + 5*y^4"))
    chk = verify_candidate_property(range(len(roots)), roots)
    assert chk.max_ratio == LogScaleReal.from_int(1) and chk.passes_at_R


def test_missing_real_root_is_unbounded():
    roots = certified_roots(parse_form("x^3 - 2*y^3"))
    complex_only = [i for i, r in enumerate(roots) if not r.is_real]
    chk = verify_candidate_property(complex_only, roots, R=threshold_R(3))
    assert not chk.passes_at_R


@pytest.mark.parametrize("kind", ["S", "T", "T*"])
def test_candidate_sets_within_cap(kind):
    F = parse_form("x^7 + 2*x^3*y^4 - 3*y^7")
    S = build_candidate_set(F, kind)
    assert len(S) <= 6 * F.sparsity + 4 == S.bound
    side = "y" if kind == "T*" else "x"
    roots = certified_roots(F, side=side)
    assert verify_candidate_property(S, roots, R=threshold_R(7)).passes_at_R
    assert all(i in S.indices for i, r in enumerate(roots) if r.is_real)
    assert len(S.with_root(next(i for i in range(len(roots)) if i not in S.indices))) == len(S) + 1
