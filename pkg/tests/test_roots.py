from __future__ import annotations

import pytest
from mpmath import mp, mpc, mpf

from sparsethue.forms import FormError, UnimodularMap, apply_map, parse_form
from sparsethue.roots import (
    RootIsolationError,
    certified_roots,
    linear_form_abs,
    map_roots,
    mapped_roots_for_bits,
    polynomial_roots,
    roots_for_bits,
)


def _contains(root, z) -> bool:
    return abs(root.center - z) <= root.radius


def test_cube_root_of_two():
    roots = certified_roots(parse_form("x^3 - 2*y^3"))
    assert len(roots) == 3
    real = [r for r in roots if r.is_real]
    assert len(real) == 1
    with mp.workprec(300):
        assert _contains(real[0], mp.cbrt(2))
        w = mp.exp(2j * mp.pi / 3)
        for k in (1, 2):
            assert any(_contains(r, mp.cbrt(2) * w**k) for r in roots)


def test_gaussian_roots_pair_up():
    roots = certified_roots(parse_form("x^2 + y^2"))
    assert not any(r.is_real for r in roots)
    assert roots[0].conjugate_pair_index == 1 and roots[1].conjugate_pair_index == 0
    assert any(_contains(r, mpc(0, 1)) for r in roots)


def test_fifth_roots_and_radius():
    roots = certified_roots(parse_form("x^5 - 2*y^5"), precision=512)
    assert len(roots) == 5 and sum(r.is_real for r in roots) == 1
    for r in roots:
        lo, hi = r.modulus_bounds()
        with mp.workprec(512):
            assert lo <= mpf(2) ** (mpf(1) / 5) <= hi
        assert r.radius < mpf(2) ** -400


def test_y_side_roots_are_reciprocal():
    F = parse_form("x^3 - 2*y^3")
    (ry,) = [r for r in certified_roots(F, side="y") if r.is_real]
    with mp.workprec(300):
        assert _contains(ry, 1 / mp.cbrt(2))


def test_side_requirements():
    with pytest.raises(FormError):
        certified_roots(parse_form("x^2*y + y^3"), side="y")
    with pytest.raises(FormError):
        certified_roots(parse_form("x^3 + x*y^2"))


def test_repeated_root_is_reported():
    with pytest.raises(RootIsolationError):
        certified_roots(parse_form("x^2 - 2*x*y + y^2"))


def test_roots_for_bits_meet_target():
    roots = roots_for_bits(parse_form("x^4 - 3*x*y^3 + y^4"), 900)
    assert all(r.radius <= mpf(2) ** -900 for r in roots)


def test_polynomial_roots():
    roots = polynomial_roots([-6, 11, -6, 1])
    centers = sorted(float(r.center.real) for r in roots)
    assert centers == pytest.approx([1, 2, 3])


def test_mapped_roots_match_direct_isolation():
    F = parse_form("x^5 + 3*x^2*y^3 - 7*y^5")
    A = UnimodularMap(3, 2, 1, 1)
    mapped = map_roots(roots_for_bits(F, 300), A)
    direct = certified_roots(apply_map(F, A), precision=512)
    assert [r.is_real for r in mapped] == [r.is_real for r in direct]
    for m in mapped:
        assert any(abs(m.center - d.center) <= m.radius + d.radius for d in direct)
    pairs = [m.conjugate_pair_index for m in mapped]
    for i, j in enumerate(pairs):
        assert j is None or pairs[j] == i
    assert all(r.radius <= mpf(2) ** -200 for r in mapped_roots_for_bits(F, A, 200))


def test_linear_form_at_a_solution():
    F = parse_form("x^3 - 2*y^3")
    (r,) = [r for r in certified_roots(F, precision=512) if r.is_real]
    lo, hi = linear_form_abs(r, 1, 1)
    with mp.workprec(1200):
        assert lo <= mp.cbrt(2) - 1 <= hi
