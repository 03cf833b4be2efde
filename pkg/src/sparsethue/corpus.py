"""Deterministic generation of test forms.

Families:

* ``bennett``: ``(a+1) x^n - a y^n``, whose only positive solution of ``F = 1`` is ``(1, 1)``.
* ``siegel``: ``a x^n - b y^n`` with ``|ab|^(n/2-1) >= 4 (n prod_(p|n) p^(1/(p-1)))^n c^(2n-2)``.
* ``binomial``: huge binomials meeting the small-height hypothesis of either theorem.
* ``trinomial``: ``x^n + b x^k y^(n-k) +- y^n`` grown until the Part II hypothesis holds.
* ``random-fewnomial``: small random forms for the exact-invariant suites.

Coefficient sizes for the hypothesis-targeted families are first solved in
log scale from the closed form ``|D(a x^n - b y^n)| = n^n (ab)^(n-1)`` and then
re-verified with the certified hypothesis checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import ceil, log
from typing import Iterable

from mpmath import iv
from sympy import primefactors

from .analytic import denominator_thm1, hypothesis_thm2, kappa_condition
from .forms import BinaryForm, Irreducible, irreducibility_certificate
from .logscale import LogScaleReal, compare, interval_context, ladder
from .resultants import DiscriminantValue, binomial_discriminant_abs, discriminant

FAMILIES = ("binomial", "trinomial", "random-fewnomial", "bennett", "siegel")
MAX_DIGITS = 10**6


class InfeasibleSpec(ValueError):
    """The requested hypothesis cannot be met within the digit budget."""


@dataclass(frozen=True)
class CorpusSpec:
    family: str
    n_range: tuple[int, int] = (3, 6)
    count: int = 10
    seed: int = 0
    h_values: tuple[int, ...] = (1,)
    target: str | None = None
    coeff_bound: int = 50
    max_digits: int = MAX_DIGITS
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        lo, hi = self.n_range
        if lo > hi or lo < 2:
            raise ValueError("degree range must satisfy 2 <= lo <= hi")
        if self.target not in (None, "thm1", "thm2"):
            raise ValueError("target must be thm1, thm2 or None")
        if self.count < 0:
            raise ValueError("count must be non-negative")


@dataclass(frozen=True)
class CorpusItem:
    ident: str
    family: str
    form: BinaryForm
    h: int
    params: dict

    def to_json(self) -> dict:
        return {
            "id": self.ident,
            "family": self.family,
            "form": self.form.to_json(),
            "h": self.h,
            "params": {k: str(v) for k, v in sorted(self.params.items())},
        }


def parse_range(text: str) -> tuple[int, int]:
    """``"4..6"`` or ``"5"`` to an inclusive pair."""
    if ".." in text:
        a, b = text.split("..", 1)
        return int(a), int(b)
    return int(text), int(text)


def _irreducible(F: BinaryForm) -> bool:
    return isinstance(irreducibility_certificate(F), Irreducible)


def _random_with_digits(rng: random.Random, digits: int) -> int:
    if digits <= 1:
        return rng.randint(2, 9)
    return rng.randrange(10 ** (digits - 1), 10**digits)


# -- families ---------------------------------------------------------------------


def bennett_form(a: int, n: int) -> BinaryForm:
    return BinaryForm.from_terms(n, [(n, a + 1), (0, -a)])


def siegel_condition(a: int, b: int, c: int, n: int) -> bool:
    """Certified ``|ab|^(n/2-1) >= 4 (n prod_(p|n) p^(1/(p-1)))^n c^(2n-2)``."""

    def decide():
        with interval_context():
            lhs = LogScaleReal.from_int(abs(a * b)) ** (iv.mpf(n) / 2 - 1)
            inner = iv.log(n) + sum((iv.log(p) / (p - 1) for p in primefactors(n)), iv.mpf(0))
            rhs = LogScaleReal.from_log(iv.log(4) + n * inner) * LogScaleReal.from_int(c) ** (2 * n - 2)
        cmp = compare(lhs, rhs, allow_equal=True)
        return None if cmp is None else cmp >= 0

    return ladder(decide)


def _siegel_items(spec: CorpusSpec, rng: random.Random) -> list[CorpusItem]:
    out = []
    c_max = int(spec.params.get("c_max", 4))
    while len(out) < spec.count:
        n = rng.randint(*spec.n_range)
        c = rng.randint(1, c_max)
        digits = 1
        while True:
            a = _random_with_digits(rng, digits)
            b = _random_with_digits(rng, digits)
            if a != b and siegel_condition(a, b, c, n):
                break
            digits += 1
        F = BinaryForm.from_terms(n, [(n, a), (0, -b)])
        if F.content != 1 or not _irreducible(F):
            continue
        out.append(CorpusItem(f"siegel-{len(out)}", "siegel", F, c, {"a": a, "b": b, "c": c, "n": n}))
    return out


def _bennett_items(spec: CorpusSpec, rng: random.Random) -> list[CorpusItem]:
    a_max = int(spec.params.get("a_max", 10))
    out = []
    for k in range(spec.count):
        n = rng.randint(*spec.n_range)
        a = rng.randint(2, a_max)
        out.append(CorpusItem(f"bennett-{k}", "bennett", bennett_form(a, n), 1, {"a": a, "n": n}))
    return out


def thm1_binomial_digits(n: int, h: int, slack: float = 100.0) -> int:
    """Digits of ``c`` making ``(c+1) x^n - c y^n`` satisfy the kappa = 2 condition with room ``e^slack``.

    ``|D| ~ n^n c^(2n-2)`` and the condition reads
    ``ln|D| / (5(n-1)) >= ln h + ln denominator``.
    """
    with interval_context():
        den = float(iv.mpf(denominator_thm1(n, 1).log).b)
    need = 5 * (n - 1) * (log(h) + den + slack) - n * log(n)
    return max(2, ceil(need / (2 * (n - 1) * log(10))) + 1)


def _thm1_binomial(n: int, h: int, rng: random.Random, max_digits: int) -> tuple[BinaryForm, dict]:
    digits = thm1_binomial_digits(n, h)
    while digits <= max_digits:
        c = _random_with_digits(rng, digits)
        F = BinaryForm.from_terms(n, [(n, c + 1), (0, -c)])
        D = DiscriminantValue(n**n * (c * (c + 1)) ** (n - 1))
        if kappa_condition(D, h, n, 1, 2) and _irreducible(F):
            return F, {"n": n, "digits": digits, "kappa": 2}
        digits += 1
    raise InfeasibleSpec(f"hypothesis (kappa = 2) not met within {max_digits} digits")


def thm2_binomial_digits(n: int, h: int) -> int:
    """Digits of ``a`` making ``a x^n - (a c^n - 1) y^n`` satisfy the exact Part II test: ``ab > 10^(4n) h^4``."""
    return max(1, ceil((4 * n + 4 * log(h, 10)) / 2) + 1)


def _thm2_binomial(n: int, h: int, rng: random.Random, max_digits: int) -> tuple[BinaryForm, dict]:
    digits = thm2_binomial_digits(n, h)
    while digits <= max_digits:
        a = _random_with_digits(rng, digits)
        c = rng.randint(2, 9)
        b = a * c**n - 1
        F = BinaryForm.from_terms(n, [(n, a), (0, -b)])
        D = DiscriminantValue(binomial_discriminant_abs(n, a, b))
        if hypothesis_thm2(D, h, n) and F.content == 1 and _irreducible(F):
            return F, {"n": n, "a": a, "c": c, "planted": f"({c},1)"}
        digits += 1
    raise InfeasibleSpec(f"Part II hypothesis not met within {max_digits} digits")


def _thm2_trinomial(n: int, h: int, rng: random.Random, max_digits: int) -> tuple[BinaryForm, dict]:
    k = rng.randint(1, n - 1)
    e = rng.choice((1, -1))
    digits = max(2, ceil(4 * n / (n - 1)) + 2)
    while digits <= max_digits:
        b = _random_with_digits(rng, digits) * rng.choice((1, -1))
        F = BinaryForm.from_terms(n, [(n, 1), (k, b), (0, e)])
        if hypothesis_thm2(discriminant(F), h, n) and _irreducible(F):
            return F, {"n": n, "k": k, "b": b, "e": e}
        digits += 1
    raise InfeasibleSpec(f"Part II hypothesis not met within {max_digits} digits")


def _random_fewnomial(spec: CorpusSpec, rng: random.Random) -> tuple[BinaryForm, dict]:
    n = rng.randint(*spec.n_range)
    s = rng.randint(1, n)
    middle = rng.sample(range(1, n), min(s - 1, n - 1))
    B = spec.coeff_bound
    coeff = lambda: rng.choice([v for v in range(-B, B + 1) if v])
    terms = [(n, coeff()), (0, coeff())] + [(e, coeff()) for e in middle]
    return BinaryForm.from_terms(n, terms), {"n": n}


def generate_corpus(spec: CorpusSpec) -> list[CorpusItem]:
    """Forms with their ``h``, reproducible from ``spec.seed``."""
    rng = random.Random(f"{spec.family}:{spec.seed}")
    if spec.family == "bennett":
        return _bennett_items(spec, rng)
    if spec.family == "siegel":
        return _siegel_items(spec, rng)
    out: list[CorpusItem] = []
    guard = 0
    while len(out) < spec.count:
        guard += 1
        if guard > 100 * max(spec.count, 1):
            raise InfeasibleSpec("could not produce enough admissible forms")
        h = spec.h_values[len(out) % len(spec.h_values)]
        n = rng.randint(*spec.n_range)
        if spec.family == "binomial":
            if spec.target == "thm1":
                F, params = _thm1_binomial(n, h, rng, spec.max_digits)
            else:
                F, params = _thm2_binomial(n, h, rng, spec.max_digits)
        elif spec.family == "trinomial":
            F, params = _thm2_trinomial(n, h, rng, spec.max_digits)
        else:
            F, params = _random_fewnomial(spec, rng)
            if F.content != 1:
                continue
            if spec.params.get("irreducible") and not _irreducible(F):
                continue
        out.append(CorpusItem(f"{spec.family}-{len(out)}", spec.family, F, h, params))
    return out


def corpus_forms(items: Iterable[CorpusItem]) -> list[tuple[BinaryForm, int]]:
    return [(it.form, it.h) for it in items]
