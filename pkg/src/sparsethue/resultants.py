"""Exact resultants and discriminants via fraction-free elimination.

Sign conventions: the Sylvester matrix of ``f`` (degree m) and ``g`` (degree k)
stacks k shifted rows of f's coefficients (highest power first) above m
shifted rows of g's, so ``Res(x - a, x - b) = a - b``. The discriminant of a
binary form of degree n is ``(-1)^(n(n-1)/2) Res(f, f') / a_n`` with
``f = F(z, 1)``; this equals ``a_n^(2n-2) prod_{i<j} (alpha_i - alpha_j)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import gmpy2

from .forms import BinaryForm, FormError, UnimodularMap, apply_map, dehomogenize, int_to_str
from .logscale import LogScaleReal


def _trim(p: Sequence[int]) -> list[int]:
    p = [int(c) for c in p]
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [0]


def sylvester_matrix(f: Sequence[int], g: Sequence[int]) -> list[list[int]]:
    """Sylvester matrix of two polynomials given as ascending coefficient lists."""
    f, g = _trim(f), _trim(g)
    m, k = len(f) - 1, len(g) - 1
    size = m + k
    fd, gd = f[::-1], g[::-1]
    rows = []
    for i in range(k):
        rows.append([0] * i + fd + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gd + [0] * (size - k - 1 - i))
    return rows


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant by Bareiss fraction-free elimination with row pivoting.

    Every intermediate entry is a minor of the input, so entry sizes grow
    linearly with the step count instead of exponentially.
    """
    n = len(matrix)
    if n == 0:
        return 1
    a = [[gmpy2.mpz(v) for v in row] for row in matrix]
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    sign = 1
    prev = gmpy2.mpz(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            lead = ri[k]
            for j in range(k + 1, n):
                ri[j] = (pivot * ri[j] - lead * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return int(sign * a[n - 1][n - 1])


def cofactor_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Laplace expansion along the first row with memoization on column subsets.

    Slow but structurally independent of elimination; used as an oracle.
    """
    n = len(matrix)
    rows = [tuple(int(v) for v in r) for r in matrix]

    @lru_cache(maxsize=None)
    def minor(row: int, cols: tuple[int, ...]) -> int:
        if row == n:
            return 1
        total = 0
        for pos, c in enumerate(cols):
            v = rows[row][c]
            if v:
                sub = minor(row + 1, cols[:pos] + cols[pos + 1 :])
                total += -v * sub if pos % 2 else v * sub
        return total

    return minor(0, tuple(range(n)))


def sylvester_resultant(f: Sequence[int], g: Sequence[int], method: str = "bareiss") -> int:
    """Resultant of two integer polynomials (ascending coefficients)."""
    f, g = _trim(f), _trim(g)
    if f == [0] and g == [0]:
        raise ValueError("resultant of two zero polynomials is undefined")
    if f == [0] or g == [0]:
        return 0
    mat = sylvester_matrix(f, g)
    if method == "bareiss":
        return bareiss_determinant(mat)
    if method == "cofactor":
        return cofactor_determinant(mat)
    raise ValueError(f"unknown method {method!r}")


def derivative(f: Sequence[int]) -> list[int]:
    return [k * c for k, c in enumerate(f)][1:] or [0]


@dataclass(frozen=True)
class DiscriminantValue:
    value: int

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @cached_property
    def log_abs(self) -> LogScaleReal:
        """``|D|`` as a log-scale enclosure."""
        return LogScaleReal.from_int(abs(self.value))

    def to_json(self) -> dict:
        return {"value": int_to_str(self.value), "log_abs": self.log_abs.to_json() if self.value else None}


def _poly_discriminant(f: list[int], n: int, method: str) -> int:
    res = sylvester_resultant(f, derivative(f), method)
    q, r = divmod(res, f[-1])
    if r:
        raise ArithmeticError("leading coefficient does not divide Res(f, f')")
    return -q if (n * (n - 1) // 2) % 2 else q


def discriminant(F: BinaryForm, method: str = "bareiss") -> DiscriminantValue:
    """Discriminant of a binary form over all n projective roots."""
    n = F.degree
    if n < 2:
        raise FormError("discriminant needs degree >= 2")
    if F.leading != 0:
        return DiscriminantValue(_poly_discriminant(dehomogenize(F, "x"), n, method))
    if F.trailing != 0:
        # swapping x and y has determinant -1 and (-1)^(n(n-1)) = 1
        return DiscriminantValue(_poly_discriminant(dehomogenize(F, "y"), n, method))
    # x and y both divide F: G(x, y) = F(x, kx + y) has det 1 and G(1, 0) = F(1, k) != 0
    k = 1
    while F(1, k) == 0:
        k += 1
    G = apply_map(F, UnimodularMap(1, 0, k, 1))
    return DiscriminantValue(_poly_discriminant(dehomogenize(G, "x"), n, method))


def check_disc_transform(F: BinaryForm, A: UnimodularMap) -> bool:
    """Exact check of ``D(F_A) = det(A)^(n(n-1)) D(F)``."""
    n = F.degree
    lhs = discriminant(apply_map(F, A)).value
    rhs = A.det ** (n * (n - 1)) * discriminant(F).value
    return lhs == rhs


def binomial_discriminant_abs(n: int, a: int, b: int) -> int:
    """Closed form ``|D(a x^n - b y^n)| = n^n (ab)^(n-1)``."""
    return n**n * abs(a * b) ** (n - 1)
