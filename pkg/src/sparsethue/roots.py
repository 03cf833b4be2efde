"""Certified isolation of the complex roots of a dehomogenized binary form.

Approximations come from Aberth-Ehrlich simultaneous iteration started on the
circles predicted by the Newton polygon. Each approximation ``z_i`` is then
wrapped in the inclusion disc ``|z - z_i| <= n |p(z_i)| / |a_n prod_{j != i}
(z_i - z_j)|``; when these discs are pairwise disjoint each one holds exactly
one root. The residual ``p(z_i)`` is padded by a bound on the floating-point
evaluation error so the discs are sound even when coefficients have far more
digits than the working precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from mpmath import iv, mp, mpc, mpf

from .forms import BinaryForm, FormError
from .logscale import PRECISION_LADDER, ends, interval_context


class RootIsolationError(ArithmeticError):
    """Roots could not be separated at any precision tried."""


@dataclass(frozen=True)
class RootEnclosure:
    """A disc known to contain exactly one root.

    ``side`` is ``"x"`` for roots of ``F(z, 1)`` and ``"y"`` for roots of ``F(1, z)``.
    """

    center: mpc
    radius: mpf
    is_real: bool
    conjugate_pair_index: int | None
    side: str = "x"
    precision: int = 256

    def box(self):
        """Complex interval box containing the disc (at the enclosure's precision)."""
        c = self.center
        with interval_context(self.precision):
            spread = iv.mpf([-self.radius, self.radius])
            re = iv.mpf(c.real) + spread
            if self.is_real:
                return iv.mpc(re, 0)
            return iv.mpc(re, iv.mpf(c.imag) + spread)

    def real_interval(self):
        """Interval containing a real root (only meaningful when ``is_real``)."""
        with interval_context(self.precision):
            return iv.mpf(self.center.real) + iv.mpf([-self.radius, self.radius])

    def modulus_bounds(self) -> tuple[mpf, mpf]:
        with interval_context(self.precision):
            m = abs(iv.mpc(self.center.real, self.center.imag))
            lo, hi = ends(m - self.radius)[0], ends(m + self.radius)[1]
            return max(mpf(0), lo), hi

    def imag_abs_bounds(self) -> tuple[mpf, mpf]:
        if self.is_real:
            return mpf(0), mpf(0)
        with interval_context(self.precision):
            a = iv.mpf(abs(self.center.imag))
            lo, hi = ends(a - self.radius)[0], ends(a + self.radius)[1]
            return max(mpf(0), lo), hi

    def to_json(self) -> dict:
        return {
            "re": mp.nstr(self.center.real, 20),
            "im": mp.nstr(self.center.imag, 20),
            "radius": mp.nstr(self.radius, 5),
            "is_real": self.is_real,
            "pair": self.conjugate_pair_index,
        }


def _sparse_poly(F: BinaryForm, side: str) -> tuple[tuple[tuple[int, int], ...], int]:
    """Terms of ``F(z, 1)`` or ``F(1, z)`` as ``(power, coeff)`` and the degree."""
    n = F.degree
    if side == "x":
        terms = tuple(F.terms)
    elif side == "y":
        terms = tuple(sorted((n - e, a) for e, a in F.terms))
    else:
        raise ValueError("side must be 'x' or 'y'")
    return terms, terms[-1][0]


def _initial_guesses(terms, wp: int) -> list[mpc]:
    from .newton import newton_polygon_of

    poly = newton_polygon_of(terms)
    guesses: list[mpc] = []
    n = terms[-1][0]
    for k, edge in enumerate(poly.edges):
        rad = mp.exp(edge.log_radius)
        m = edge.multiplicity
        for j in range(m):
            theta = 2 * mp.pi * j / m + mpf("0.7") + 2 * mp.pi * k / n
            guesses.append(rad * mp.expj(theta))
    return guesses


def _ipow(z: mpc, k: int) -> mpc:
    # binary powering; mpmath's integer power goes through exp/log at high precision
    out = mpc(1)
    while k:
        if k & 1:
            out *= z
        k >>= 1
        if k:
            z *= z
    return out


def _eval(terms, z: mpc) -> tuple[mpc, mpc]:
    p = mpc(0)
    dp = mpc(0)
    cur, zp = 0, mpc(1)  # zp = z**cur
    for e, a in terms:
        if e == 0:
            p += a
            continue
        zp *= _ipow(z, e - 1 - cur)
        cur = e - 1
        p += a * zp * z
        dp += e * a * zp
    return p, dp


def _aberth(terms, coeffs, wp: int, max_iter: int = 400, start: list[mpc] | None = None) -> list[mpc]:
    z = [mpc(v) for v in start] if start is not None else _initial_guesses(terms, wp)
    n = len(z)
    tol = mpf(2) ** (-wp + 12)
    for _ in range(max_iter):
        worst = mpf(0)
        for i in range(n):
            p, dp = _eval(coeffs, z[i])
            if p == 0:
                continue
            if dp == 0:
                dp = mpf(2) ** (-wp)
            w = p / dp
            s = mpc(0)
            zi = z[i]
            for j in range(n):
                if j != i:
                    diff = zi - z[j]
                    if diff == 0:
                        diff = mpf(2) ** (-wp) * (1 + abs(zi))
                    s += 1 / diff
            step = w / (1 - w * s)
            z[i] = zi - step
            rel = abs(step) / max(abs(z[i]), mpf(2) ** (-wp))
            worst = max(worst, rel)
        if worst < tol:
            break
    return z


def _inclusion_radii(terms, coeffs, z: list[mpc], wp: int) -> list[mpf]:
    n = len(z)
    lead = abs(coeffs[-1][1])
    eps = mpf(2) ** (-wp + 8)
    radii = []
    for i in range(n):
        p, _ = _eval(coeffs, z[i])
        az = abs(z[i])
        scale = sum(abs(a) * az**e for e, a in coeffs)
        resid = abs(p) + eps * (len(coeffs) + n + 2) * scale
        prod = mpf(1)
        for j in range(n):
            if j != i:
                prod *= abs(z[i] - z[j])
        if prod == 0:
            return []
        r = n * resid / (lead * prod)
        radii.append(r * (1 + mpf(2) ** (-wp // 2)) + mpf(2) ** (-wp) * (1 + az))
    return radii


def _discs_disjoint(z, radii) -> bool:
    n = len(z)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= (radii[i] + radii[j]) * (1 + mpf(2) ** (-mp.prec + 8)):
                return False
    return True


def _try_isolate(terms, wp: int, side: str) -> tuple[RootEnclosure, ...] | None:
    with mp.workprec(wp):
        coeffs = tuple((e, mpf(a)) for e, a in terms)
        start = None
        if wp > 1024:
            # polish a lower-precision isolation instead of restarting from scratch
            coarse = _try_isolate(terms, max(512, wp // 4), side)
            start = None if coarse is None else [r.center for r in coarse]
        z = _aberth(terms, coeffs, wp, start=start)
        radii = _inclusion_radii(terms, coeffs, z, wp)
        if not radii or not _discs_disjoint(z, radii):
            return None
        n = len(z)
        real = []
        for i in range(n):
            if abs(z[i].imag) > radii[i]:
                real.append(False)
                continue
            # the disc symmetric about R that covers disc i and its mirror image
            big_c = mpc(z[i].real, 0)
            big_r = radii[i] + abs(z[i].imag)
            ok = all(
                abs(big_c - z[j]) > (big_r + radii[j]) * (1 + mpf(2) ** (-wp + 8)) for j in range(n) if j != i
            )
            if not ok:
                return None
            real.append(True)
        order = sorted(range(n), key=lambda i: (not real[i], z[i].real, z[i].imag))
        z = [z[i] for i in order]
        radii = [radii[i] for i in order]
        real = [real[i] for i in order]
        pair: list[int | None] = [None] * n
        for i in range(n):
            if real[i]:
                continue
            mirror = mp.conj(z[i])
            hits = [j for j in range(n) if j != i and abs(mirror - z[j]) <= radii[i] + radii[j]]
            if len(hits) != 1:
                return None
            pair[i] = hits[0]
        out = []
        for i in range(n):
            c = mpc(z[i].real, 0) if real[i] else z[i]
            r = (radii[i] + abs(z[i].imag)) * (1 + mpf(2) ** (-wp + 4)) if real[i] else radii[i]
            out.append(RootEnclosure(c, r, real[i], pair[i], side, wp))
        return tuple(out)


@lru_cache(maxsize=512)
def _isolate_cached(terms: tuple, prec: int, side: str) -> tuple[RootEnclosure, ...]:
    rungs = sorted({prec, *[p for p in PRECISION_LADDER if p > prec]})
    if rungs[-1] < 4 * prec:
        rungs.append(4 * prec)
    for wp in rungs:
        found = _try_isolate(terms, wp, side)
        if found is not None:
            return found
    raise RootIsolationError(f"could not separate the roots at precision up to {rungs[-1]} bits")


def certified_roots(F: BinaryForm, precision: int = 256, side: str = "x") -> tuple[RootEnclosure, ...]:
    """Certified enclosures of the roots of ``F(z, 1)`` (side ``"x"``) or ``F(1, z)``.

    The dehomogenization must have full degree and nonzero constant term, and F
    must be squarefree; a repeated root shows up as a :class:`RootIsolationError`.
    """
    terms, deg = _sparse_poly(F, side)
    if deg != F.degree:
        raise FormError("the form vanishes at infinity on this side; use the other dehomogenization")
    if terms[0][0] != 0:
        raise FormError("zero is a root of this dehomogenization")
    return _isolate_cached(terms, int(precision), side)


def polynomial_roots(coeffs: Sequence[int], precision: int = 256) -> tuple[RootEnclosure, ...]:
    """Certified roots of a univariate integer polynomial (ascending coefficients, nonzero ends)."""
    terms = tuple((e, int(a)) for e, a in enumerate(coeffs) if a)
    if not terms or terms[0][0] != 0:
        raise ValueError("constant term must be nonzero")
    if terms[-1][0] == 0:
        return ()
    return _isolate_cached(terms, int(precision), "x")


def roots_for_bits(F: BinaryForm, bits_needed: int, side: str = "x") -> tuple[RootEnclosure, ...]:
    """Roots whose radii are at most ``2^-bits_needed`` in absolute terms."""
    prec = max(256, bits_needed + 64)
    while True:
        roots = certified_roots(F, prec, side)
        target = mpf(2) ** (-bits_needed)
        if all(r.radius <= target for r in roots):
            return roots
        if prec > 4 * (bits_needed + 64) + 4096:
            raise RootIsolationError(f"radius target 2^-{bits_needed} not reached")
        prec *= 2


def _point_prec(root: RootEnclosure, x: int, y: int) -> int:
    return root.precision + max(abs(x), abs(y)).bit_length() + 16


def linear_form_box(root: RootEnclosure, x: int, y: int):
    """Complex interval enclosing ``x - alpha y`` (side x) or ``y - beta x`` (side y)."""
    with interval_context(_point_prec(root, x, y)):
        if root.side == "x":
            return iv.mpf(x) - root.box() * y
        return iv.mpf(y) - root.box() * x


def linear_form_abs(root: RootEnclosure, x: int, y: int) -> tuple[mpf, mpf]:
    """Lower and upper bounds on ``|L(x, y)|`` for one root."""
    with interval_context(_point_prec(root, x, y)):
        v = linear_form_box(root, x, y)
        re_lo, re_hi = ends(v.real)
        im_lo, im_hi = ends(v.imag)
        lo_re = mpf(0) if re_lo <= 0 <= re_hi else min(abs(re_lo), abs(re_hi))
        lo_im = mpf(0) if im_lo <= 0 <= im_hi else min(abs(im_lo), abs(im_hi))
        hi_re = max(abs(re_lo), abs(re_hi))
        hi_im = max(abs(im_lo), abs(im_hi))
        lo = ends(iv.sqrt(iv.mpf(lo_re) ** 2 + iv.mpf(lo_im) ** 2))[0]
        hi = ends(iv.sqrt(iv.mpf(hi_re) ** 2 + iv.mpf(hi_im) ** 2))[1]
    return lo, hi


def map_roots(roots: Sequence[RootEnclosure], A, precision: int | None = None) -> tuple[RootEnclosure, ...]:
    """Roots of ``F(az + b, cz + d)`` from those of ``F(z, 1)``: ``z = (d alpha - b) / (a - c alpha)``.

    Each image disc covers the image of the source disc: for ``|alpha' - alpha| <= r``,
    ``|z' - z| <= r |det| / (|a - c alpha| (|a - c alpha| - |c| r))``. Realness and
    conjugate pairing carry over because the map has real coefficients.
    """
    a, b, c, d = A.a, A.b, A.c, A.d
    det = abs(a * d - b * c)
    if det == 0:
        raise FormError("singular matrix")
    wp = precision or max(r.precision for r in roots) + 2 * max(abs(a), abs(b), abs(c), abs(d), 2).bit_length() + 32
    images = []
    with interval_context(wp):
        for r in roots:
            alpha = iv.mpc(r.center.real, r.center.imag)
            den = a - c * alpha
            den_lo = ends(iv.mpf(ends(abs(den))[0]) - abs(c) * iv.mpf(r.radius))[0]
            if den_lo <= 0:
                raise RootIsolationError("a root lies too close to the pole of the map; refine the source roots")
            z = (d * alpha - b) / den
            re_lo, re_hi = ends(z.real)
            im_lo, im_hi = ends(z.imag)
            center = mpc((re_lo + re_hi) / 2, 0 if r.is_real else (im_lo + im_hi) / 2)
            spread = ends(abs(iv.mpc(iv.mpf([re_lo, re_hi]) - center.real, iv.mpf([im_lo, im_hi]) - center.imag)))[1]
            rad = ends(det * iv.mpf(r.radius) / (abs(den) * iv.mpf(den_lo)))[1] + spread
            images.append((center, rad, r.is_real))
    order = sorted(range(len(images)), key=lambda i: (not images[i][2], images[i][0].real, images[i][0].imag))
    where = {old: new for new, old in enumerate(order)}
    out = []
    for i in order:
        center, rad, real = images[i]
        pair = roots[i].conjugate_pair_index
        out.append(RootEnclosure(center, rad, real, None if pair is None else where[pair], "x", wp))
    return tuple(out)


def mapped_roots_for_bits(F: BinaryForm, A, bits_needed: int) -> tuple[RootEnclosure, ...]:
    """Roots of ``F(az + b, cz + d)`` with radii at most ``2^-bits_needed``, via the roots of ``F``."""
    extra = 2 * max(abs(A.a), abs(A.c), 2).bit_length() + 16
    bits = bits_needed + extra
    while True:
        try:
            out = map_roots(roots_for_bits(F, bits), A)
        except RootIsolationError:
            out = None
        target = mpf(2) ** (-bits_needed)
        if out is not None and all(r.radius <= target for r in out):
            return out
        if bits > 4 * (bits_needed + extra) + 4096:
            raise RootIsolationError(f"radius target 2^-{bits_needed} not reached")
        bits *= 2
