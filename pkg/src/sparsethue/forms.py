"""Sparse integer binary forms, the GL2(Z) action, and irreducibility certificates.

A form ``F(x, y) = sum a_i x^{n_i} y^{n - n_i}`` is stored as a tuple of
``(n_i, a_i)`` pairs in ascending order of the x-exponent, zero coefficients
dropped.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from math import comb, gcd
from typing import Iterable, Sequence, Union

import gmpy2
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_ddf_zassenhaus, gf_from_int_poly, gf_monic, gf_sqf_p


class FormError(ValueError):
    """Raised for malformed form expressions or invalid form data."""


def int_to_str(n: int) -> str:
    # gmpy2 sidesteps the interpreter's int->str digit limit
    return gmpy2.mpz(n).digits()


def str_to_int(s: str) -> int:
    return int(gmpy2.mpz(s.strip()))


@dataclass(frozen=True)
class LatticePoint:
    x: int
    y: int

    @property
    def is_primitive(self) -> bool:
        return gcd(self.x, self.y) == 1

    @property
    def norm(self) -> int:
        """``|x| = max(|x|, |y|)``."""
        return max(abs(self.x), abs(self.y))

    @property
    def inner_norm(self) -> int:
        """``<x> = min(|x|, |y|)``."""
        return min(abs(self.x), abs(self.y))

    def canonical(self) -> LatticePoint:
        """Representative of ``{p, -p}`` with ``y > 0``, or ``y == 0`` and ``x > 0``."""
        if self.y < 0 or (self.y == 0 and self.x < 0):
            return LatticePoint(-self.x, -self.y)
        return self

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class UnimodularMap:
    """Integer matrix ``((a, b), (c, d))`` acting by ``F -> F(ax + by, cx + dy)``."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    def inverse(self) -> UnimodularMap:
        det = self.det
        if abs(det) != 1:
            raise FormError(f"matrix with determinant {det} has no integer inverse")
        return UnimodularMap(det * self.d, -det * self.b, -det * self.c, det * self.a)

    def __matmul__(self, other: UnimodularMap) -> UnimodularMap:
        return UnimodularMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, p: Union[LatticePoint, tuple[int, int]]) -> LatticePoint:
        x, y = p
        return LatticePoint(self.a * x + self.b * y, self.c * x + self.d * y)

    @classmethod
    def identity(cls) -> UnimodularMap:
        return cls(1, 0, 0, 1)

    @classmethod
    def swap(cls) -> UnimodularMap:
        return cls(0, 1, 1, 0)

    @classmethod
    def shear(cls, m: int) -> UnimodularMap:
        return cls(1, m, 0, 1)


@dataclass(frozen=True)
class BinaryForm:
    degree: int
    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.degree < 1:
            raise FormError("degree must be positive")
        if not self.terms:
            raise FormError("the zero form is not a binary form")
        prev = -1
        for e, a in self.terms:
            if not 0 <= e <= self.degree:
                raise FormError(f"exponent {e} outside [0, {self.degree}]")
            if e <= prev:
                raise FormError("exponents must be strictly increasing")
            if a == 0:
                raise FormError("zero coefficients are not stored")
            prev = e

    @classmethod
    def from_terms(cls, degree: int, pairs: Iterable[tuple[int, int]]) -> BinaryForm:
        acc: dict[int, int] = {}
        for e, a in pairs:
            acc[int(e)] = acc.get(int(e), 0) + int(a)
        terms = tuple((e, a) for e, a in sorted(acc.items()) if a != 0)
        return cls(degree, terms)

    @classmethod
    def from_dense(cls, coeffs: Sequence[int]) -> BinaryForm:
        """``coeffs[k]`` is the coefficient of ``x^k y^(n-k)``."""
        return cls.from_terms(len(coeffs) - 1, enumerate(coeffs))

    @property
    def n(self) -> int:
        return self.degree

    @property
    def sparsity(self) -> int:
        return len(self.terms) - 1

    @property
    def is_fewnomial(self) -> bool:
        return self.terms[0][0] == 0 and self.terms[-1][0] == self.degree

    def coeff(self, k: int) -> int:
        for e, a in self.terms:
            if e == k:
                return a
        return 0

    @property
    def leading(self) -> int:
        """Coefficient of ``x^n``, i.e. ``F(1, 0)``."""
        return self.coeff(self.degree)

    @property
    def trailing(self) -> int:
        """Coefficient of ``y^n``, i.e. ``F(0, 1)``."""
        return self.coeff(0)

    def dense(self) -> list[int]:
        out = [0] * (self.degree + 1)
        for e, a in self.terms:
            out[e] = a
        return out

    @property
    def content(self) -> int:
        g = 0
        for _, a in self.terms:
            g = gcd(g, a)
        return g

    def __call__(self, x: int, y: int) -> int:
        n = self.degree
        return sum(a * x**e * y ** (n - e) for e, a in self.terms)

    def swap(self) -> BinaryForm:
        """``F(y, x)``."""
        n = self.degree
        return BinaryForm.from_terms(n, ((n - e, a) for e, a in self.terms))

    def negate(self) -> BinaryForm:
        return BinaryForm(self.degree, tuple((e, -a) for e, a in self.terms))

    def __str__(self) -> str:
        return serialize(self)

    def to_json(self) -> dict:
        return {"degree": self.degree, "terms": [[e, int_to_str(a)] for e, a in self.terms]}

    @classmethod
    def from_json(cls, data: Union[dict, str]) -> BinaryForm:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls.from_terms(int(data["degree"]), ((int(e), str_to_int(str(a))) for e, a in data["terms"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormError(f"bad form JSON: {exc}") from exc


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\^|\*\*)|(\*)|([+-])|(\S))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, caret, star, sign, other = m.groups()
        if num is not None:
            out.append(("int", num))
        elif name is not None:
            out.append(("var", name))
        elif caret is not None:
            out.append(("^", caret))
        elif star is not None:
            out.append(("*", star))
        elif sign is not None:
            out.append(("sign", sign))
        else:
            raise FormError(f"unexpected character {other!r} in form expression")
        pos = m.end()
    return out


def parse_form(text: str, variables: tuple[str, str] = ("x", "y")) -> BinaryForm:
    """Parse an expression such as ``"x^3 - 2*y^3"`` into a :class:`BinaryForm`.

    Accepted syntax: integer coefficients, the two variables, ``^`` (or ``**``),
    ``*`` (optional between factors) and binary/unary ``+``/``-``.
    """
    toks = _tokenize(text)
    if not toks:
        raise FormError("empty form expression")
    vx, vy = variables
    monomials: list[tuple[int, int, int]] = []
    i = 0

    def expect_int() -> int:
        nonlocal i
        if i >= len(toks) or toks[i][0] != "int":
            raise FormError("expected an integer exponent")
        v = int(toks[i][1])
        i += 1
        return v

    while i < len(toks):
        sign = 1
        while i < len(toks) and toks[i][0] == "sign":
            if toks[i][1] == "-":
                sign = -sign
            i += 1
        coef, ex, ey = sign, 0, 0
        seen_factor = False
        while i < len(toks) and toks[i][0] in ("int", "var", "*"):
            kind, val = toks[i]
            if kind == "*":
                if not seen_factor:
                    raise FormError("dangling '*'")
                i += 1
                continue
            i += 1
            power = 1
            if i < len(toks) and toks[i][0] == "^":
                i += 1
                power = expect_int()
            if kind == "int":
                coef *= str_to_int(val) ** power
            elif val == vx:
                ex += power
            elif val == vy:
                ey += power
            else:
                raise FormError(f"unknown variable {val!r}")
            seen_factor = True
        if not seen_factor:
            raise FormError("expected a term")
        monomials.append((coef, ex, ey))
        if i < len(toks) and toks[i][0] != "sign":
            raise FormError(f"unexpected token {toks[i][1]!r}")

    degrees = {ex + ey for _, ex, ey in monomials}
    if len(degrees) != 1:
        raise FormError("form is not homogeneous")
    n = degrees.pop()
    if n < 1:
        raise FormError("form must have degree at least 1")
    acc: dict[int, int] = {}
    for c, ex, _ in monomials:
        acc[ex] = acc.get(ex, 0) + c
    if all(v == 0 for v in acc.values()):
        raise FormError("form is identically zero")
    return BinaryForm.from_terms(n, acc.items())


def _monomial(a: int, ex: int, ey: int) -> str:
    parts = []
    if ex:
        parts.append("x" if ex == 1 else f"x^{ex}")
    if ey:
        parts.append("y" if ey == 1 else f"y^{ey}")
    mag = abs(a)
    if mag != 1 or not parts:
        parts.insert(0, int_to_str(mag))
    return "*".join(parts)


def serialize(F: BinaryForm) -> str:
    """Human-readable expression, highest power of x first; round-trips through :func:`parse_form`."""
    n = F.degree
    out = []
    for e, a in reversed(F.terms):
        mono = _monomial(a, e, n - e)
        if not out:
            out.append(mono if a > 0 else "-" + mono)
        else:
            out.append(("+ " if a > 0 else "- ") + mono)
    return " ".join(out)


# -- evaluation and GL2(Z) action ------------------------------------------------


def evaluate(F: BinaryForm, p: Union[LatticePoint, tuple[int, int]]) -> int:
    x, y = p
    return F(x, y)


def height(F: BinaryForm) -> int:
    return max(abs(a) for _, a in F.terms)


def _linear_power(u: int, v: int, k: int) -> list[int]:
    # dense coefficients (index = x-exponent) of (u x + v y)^k
    return [comb(k, j) * u**j * v ** (k - j) for j in range(k + 1)]


def _convolve(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return out


def apply_map(F: BinaryForm, A: UnimodularMap) -> BinaryForm:
    """``F_A(x, y) = F(ax + by, cx + dy)``; any integer matrix is accepted."""
    n = F.degree
    total = [0] * (n + 1)
    for e, coef in F.terms:
        part = _convolve(_linear_power(A.a, A.b, e), _linear_power(A.c, A.d, n - e))
        for k, v in enumerate(part):
            total[k] += coef * v
    if not any(total):
        raise FormError("matrix maps the form to zero (singular matrix)")
    return BinaryForm.from_dense(total)


def translate(F: BinaryForm, m: int) -> BinaryForm:
    """Shear ``x -> x + m y``."""
    return apply_map(F, UnimodularMap.shear(m))


def dehomogenize(F: BinaryForm, side: str = "x") -> list[int]:
    """Dense ascending coefficients of ``F(z, 1)`` (side ``"x"``) or ``F(1, z)`` (side ``"y"``)."""
    d = F.dense()
    if side == "x":
        pass
    elif side == "y":
        d = d[::-1]
    else:
        raise ValueError("side must be 'x' or 'y'")
    while len(d) > 1 and d[-1] == 0:
        d.pop()
    return d


# -- irreducibility ------------------------------------------------------------


@dataclass(frozen=True)
class Irreducible:
    witnesses: tuple[int, ...]
    method: str = "mod-p degree patterns"


@dataclass(frozen=True)
class Reducible:
    factor: BinaryForm


@dataclass(frozen=True)
class Unknown:
    reason: str


IrreducibilityResult = Union[Irreducible, Reducible, Unknown]


def _small_primes(count: int, below: int = 1000) -> list[int]:
    out = []
    p = 2
    while len(out) < count and p < below:
        if gmpy2.is_prime(p):
            out.append(p)
        p += 1
    return out


def _subset_sums(degrees: list[int]) -> set[int]:
    sums = {0}
    for d in degrees:
        sums |= {s + d for s in sums}
    return sums


def factor_degree_pattern(coeffs_desc: Sequence[int], p: int) -> list[int] | None:
    """Degrees of the irreducible factors of a polynomial modulo ``p``.

    Returns None when ``p`` divides the leading coefficient or the reduction
    is not squarefree (``p`` divides the discriminant).
    """
    if coeffs_desc[0] % p == 0:
        return None
    f = gf_from_int_poly([int(c) for c in coeffs_desc], p)
    if not gf_sqf_p(f, p, ZZ):
        return None
    _, monic = gf_monic(f, p, ZZ)
    degrees: list[int] = []
    for g, d in gf_ddf_zassenhaus(monic, p, ZZ):
        degrees.extend([d] * ((len(g) - 1) // d))
    return degrees


def irreducibility_certificate(
    F: BinaryForm, prime_budget: int = 25, factor_digits: int = 120
) -> IrreducibilityResult:
    """Decide irreducibility over Q as far as cheaply possible.

    Factor-degree patterns of ``F(z, 1)`` modulo small primes are intersected;
    if only the trivial degrees survive, F is irreducible and the primes that
    cut the candidate set are returned as witnesses. When the patterns are
    inconclusive and the coefficients are small enough, an exact factorization
    is attempted to exhibit a factor.
    """
    if F.content != 1:
        raise FormError("form must be primitive (content 1); divide out the content first")
    n = F.degree
    if n < 2:
        raise FormError("irreducibility certificate needs degree >= 2")
    if F.leading == 0:
        return Reducible(BinaryForm(1, ((0, 1),)))  # y divides F
    if F.trailing == 0:
        return Reducible(BinaryForm(1, ((1, 1),)))  # x divides F
    desc = F.dense()[::-1]
    possible = set(range(n + 1))
    witnesses: list[int] = []
    for p in _small_primes(prime_budget):
        pattern = factor_degree_pattern(desc, p)
        if pattern is None:
            continue
        cut = possible & _subset_sums(pattern)
        if cut != possible:
            witnesses.append(p)
            possible = cut
        if possible <= {0, n}:
            return Irreducible(tuple(witnesses))
    if max(len(str(abs(a))) for _, a in F.terms) <= factor_digits:
        factor = _trial_factor(F)
        if factor is not None:
            return Reducible(factor)
        return Irreducible((), method="exact factorization")
    return Unknown(f"degree patterns modulo {prime_budget} primes leave factor degrees {sorted(possible - {0, n})}")


def _trial_factor(F: BinaryForm) -> BinaryForm | None:
    from sympy import Poly, symbols

    z = symbols("z")
    poly = Poly(F.dense()[::-1], z, domain="ZZ")
    _, factors = poly.factor_list()
    if len(factors) == 1 and factors[0][1] == 1:
        return None
    g = factors[0][0]
    coeffs = [int(c) for c in g.all_coeffs()[::-1]]
    return BinaryForm.from_dense(coeffs)


def class_Ct_bound(F: BinaryForm) -> int:
    """Fewnomials with ``s + 1`` terms lie in the class ``C(4s - 2)``."""
    return 4 * F.sparsity - 2


def directional_derivative(F: BinaryForm, u: int, v: int) -> BinaryForm:
    """``u F_x + v F_y`` as a form of degree ``n - 1``."""
    n = F.degree
    acc: dict[int, int] = {}
    for e, a in F.terms:
        if e:
            acc[e - 1] = acc.get(e - 1, 0) + u * e * a
        if n - e:
            acc[e] = acc.get(e, 0) + v * (n - e) * a
    return BinaryForm.from_terms(n - 1, acc.items())


def count_real_projective_zeros(G: BinaryForm) -> int:
    """Distinct real zeros of a binary form on the projective line (exact, via Sturm sequences)."""
    from sympy import Poly, symbols

    z = symbols("z")
    dense = dehomogenize(G, "x")
    at_infinity = 1 if len(dense) - 1 < G.degree else 0
    if len(dense) == 1:
        return at_infinity
    poly = Poly(dense[::-1], z, domain="ZZ")
    sqf = poly.sqf_part()
    return sqf.count_roots() + at_infinity
