from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsethue.forms import (
    BinaryForm,
    FormError,
    Irreducible,
    LatticePoint,
    Reducible,
    UnimodularMap,
    apply_map,
    class_Ct_bound,
    count_real_projective_zeros,
    directional_derivative,
    evaluate,
    height,
    int_to_str,
    irreducibility_certificate,
    parse_form,
    serialize,
    translate,
)

F3 = parse_form("x^3 - 2*y^3")


def test_parse_binomial():
    assert F3.terms == ((0, -2), (3, 1))
    assert F3.degree == 3 and F3.sparsity == 1 and F3.is_fewnomial


def test_parse_trinomial_sparsity():
    F = parse_form("x^5 + x^2*y^3 + y^5")
    assert F.degree == 5 and F.sparsity == 2


@pytest.mark.parametrize("text", ["x^2 + y", "x^3 - 2*z^3", "x^3 +", ""])
def test_parse_rejects(text):
    with pytest.raises(FormError):
        parse_form(text)


def test_parse_huge_coefficient_roundtrip():
    c = 10**5000 + 7
    F = parse_form(f"{int_to_str(c)}*x^4 - {int_to_str(c - 1)}*y^4")
    assert F.leading == c and F.trailing == -(c - 1)
    assert parse_form(serialize(F)) == F
    assert BinaryForm.from_json(F.to_json()) == F


def test_no_zero_coefficients_stored():
    F = parse_form("x^3 + 0*x*y^2 - 2*y^3")
    assert all(a != 0 for _, a in F.terms)
    assert F.sparsity == 1


@pytest.mark.parametrize("point, value", [((1, 1), -1), ((1, 0), 1), ((0, 1), -2)])
def test_evaluate(point, value):
    assert evaluate(F3, point) == value == F3(*point)


@pytest.mark.parametrize("text, H", [("x^3 - 2*y^3", 2), ("x^5 + x^2*y^3 + y^5", 1), ("7*x^4 - 3*x*y^3", 7)])
def test_height(text, H):
    assert height(parse_form(text)) == H


def test_apply_map_examples():
    assert apply_map(F3, UnimodularMap.swap()) == parse_form("y^3 - 2*x^3")
    assert apply_map(F3, UnimodularMap.identity()) == F3
    assert apply_map(F3, UnimodularMap(1, 1, 0, 1)) == parse_form("x^3 + 3*x^2*y + 3*x*y^2 - y^3")


def test_translate_examples():
    assert translate(parse_form("x^2 - 2*y^2"), 1) == parse_form("x^2 + 2*x*y - y^2")
    assert translate(F3, 0) == F3
    assert translate(F3, 1) == parse_form("x^3 + 3*x^2*y + 3*x*y^2 - y^3")


def test_canonical_points():
    assert LatticePoint(-1, -1).canonical() == LatticePoint(1, 1)
    assert LatticePoint(-3, 0).canonical() == LatticePoint(3, 0)
    assert LatticePoint(1, -1).canonical() == LatticePoint(-1, 1)
    p = LatticePoint(5, -4)
    assert p.norm == 5 and p.inner_norm == 4 and p.is_primitive


def test_unimodular_inverse():
    A = UnimodularMap(2, 1, 7, 4)
    assert (A @ A.inverse()) == UnimodularMap.identity()
    with pytest.raises(FormError):
        UnimodularMap(2, 0, 0, 1).inverse()


small = st.integers(-5, 5)


@settings(max_examples=60, deadline=None)
@given(small, small, small, small, small, small, small, small, st.lists(st.integers(-9, 9), min_size=4, max_size=6))
def test_apply_map_is_a_right_action(a, b, c, d, e, f, g, h, coeffs):
    if not any(coeffs):
        return
    F = BinaryForm.from_dense(coeffs)
    A, B = UnimodularMap(a, b, c, d), UnimodularMap(e, f, g, h)
    if A.det == 0 or B.det == 0:
        return
    # (F_A)_B(p) = F_A(Bp) = F(ABp)
    assert apply_map(apply_map(F, A), B) == apply_map(F, A @ B)
    for p in [(1, 0), (2, -3), (5, 7)]:
        assert apply_map(F, A)(*p) == F(*A.apply(p))


def test_irreducibility_examples():
    cert = irreducibility_certificate(F3)
    assert isinstance(cert, Irreducible) and 7 in cert.witnesses
    r = irreducibility_certificate(parse_form("x^2 - y^2"))
    assert isinstance(r, Reducible)
    r4 = irreducibility_certificate(parse_form("x^4 + 4*y^4"))
    assert isinstance(r4, Reducible) and r4.factor.degree == 2
    with pytest.raises(FormError):
        irreducibility_certificate(parse_form("2*x^3 - 4*y^3"))


@pytest.mark.parametrize("text, t", [("x^3 - 2*y^3", 2), ("x^5 + x^2*y^3 + y^5", 6), ("x^7 + x^6*y + x^5*y^2 + x^3*y^4 + x*y^6 + y^7", 18)])
def test_class_Ct_bound(text, t):
    assert class_Ct_bound(parse_form(text)) == t


def test_directional_derivatives_have_few_real_zeros():
    # a form in C(t) has at most t real projective zeros along every direction
    F = parse_form("x^7 + 3*x^4*y^3 - 5*y^7")
    t = class_Ct_bound(F)
    for u, v in [(1, 0), (0, 1), (1, 1), (2, -3), (5, 7)]:
        assert count_real_projective_zeros(directional_derivative(F, u, v)) <= t


def test_real_projective_zeros():
    assert count_real_projective_zeros(parse_form("x^2 - y^2")) == 2
    assert count_real_projective_zeros(parse_form("x^2 + y^2")) == 0
    assert count_real_projective_zeros(parse_form("x*y^2")) == 2  # x = 0 and y = 0
