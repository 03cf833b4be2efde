"""Primitive solutions of ``a <= |F(x, y)| <= b`` over bounded regions.

Three independent routes are provided:

* ``enumerate_box``: a root-free branch-and-bound over integer rectangles
  using exact interval bounds on every monomial. It is the reference oracle.
* ``enumerate_strip``: for each ``y`` in a range, only ``x`` close to
  ``Re(alpha) y`` for some root can give a small value; complete for all ``x``.
* ``enumerate_convergents``: continued-fraction convergents of certified
  real-root enclosures, complete for every solution with
  ``|alpha - x/y| < 1/(2y^2)``.

Beyond a crossover height computed from the root separation, every solution
is a convergent of a real root, which lets the hybrid search skip the bulk of
the box.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from mpmath import iv, mp, mpf

from .forms import BinaryForm, LatticePoint, int_to_str
from .logscale import ends, interval_context, to_fraction
from .roots import RootEnclosure, certified_roots, roots_for_bits


@dataclass(frozen=True)
class SolutionRecord:
    point: LatticePoint
    value: int
    route: str = "box"
    root_index: int | None = None
    linear_form: tuple[float, float] | None = None
    class1: str | None = None
    class2: str | None = None
    flags: tuple[str, ...] = ()

    @property
    def x(self) -> int:
        return self.point.x

    @property
    def y(self) -> int:
        return self.point.y

    def key(self) -> tuple[int, int]:
        return (self.point.y, self.point.x)

    def to_json(self) -> dict:
        return {
            "x": int_to_str(self.point.x),
            "y": int_to_str(self.point.y),
            "value": int_to_str(self.value),
            "route": self.route,
            "root_index": self.root_index,
            "linear_form": None if self.linear_form is None else list(self.linear_form),
            "class1": self.class1,
            "class2": self.class2,
            "flags": list(self.flags),
        }

    def csv_row(self) -> list[str]:
        return [int_to_str(self.x), int_to_str(self.y), int_to_str(self.value), self.class1 or "", self.class2 or "", self.route]


CSV_HEADER = ["x", "y", "value", "class1", "class2", "route"]


def _record(F: BinaryForm, x: int, y: int, route: str) -> SolutionRecord:
    p = LatticePoint(x, y).canonical()
    return SolutionRecord(p, abs(F(p.x, p.y)), route)


def merge(*groups: Iterable[SolutionRecord]) -> list[SolutionRecord]:
    """Union keyed by point, first route wins, sorted by ``(y, x)``."""
    seen: dict[tuple[int, int], SolutionRecord] = {}
    for g in groups:
        for r in g:
            seen.setdefault(r.key(), r)
    return [seen[k] for k in sorted(seen)]


def point_set(records: Iterable[SolutionRecord]) -> set[tuple[int, int]]:
    return {(r.x, r.y) for r in records}


# -- root-free box oracle --------------------------------------------------------


def _pow_range(lo: int, hi: int, e: int) -> tuple[int, int]:
    if e == 0:
        return 1, 1
    a, b = lo**e, hi**e
    if e % 2 == 0:
        if lo <= 0 <= hi:
            return 0, max(a, b)
        return min(a, b), max(a, b)
    return a, b


def _form_range(terms, n: int, x0: int, x1: int, y0: int, y1: int) -> tuple[int, int]:
    lo = hi = 0
    for e, c in terms:
        xl, xh = _pow_range(x0, x1, e)
        yl, yh = _pow_range(y0, y1, n - e)
        prods = (xl * yl, xl * yh, xh * yl, xh * yh)
        pl, ph = min(prods), max(prods)
        if c > 0:
            lo += c * pl
            hi += c * ph
        else:
            lo += c * ph
            hi += c * pl
    return lo, hi


@dataclass
class SearchStats:
    nodes: int = 0
    points: int = 0

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "points": self.points}


def enumerate_box(
    F: BinaryForm,
    a: int,
    b: int,
    box: int,
    y_range: tuple[int, int] | None = None,
    stats: SearchStats | None = None,
    leaf_area: int = 16,
) -> list[SolutionRecord]:
    """All primitive canonical ``(x, y)`` with ``a <= |F| <= b`` and ``max(|x|, |y|) <= box``.

    The search only uses exact integer arithmetic: a rectangle is discarded
    when the interval sum of its monomial ranges excludes ``[a, b]`` and
    ``[-b, -a]``; small rectangles are scanned point by point.
    """
    if a > b:
        raise ValueError("need a <= b")
    a = max(a, 1)
    if box < 1:
        return []
    stats = stats if stats is not None else SearchStats()
    terms, n = F.terms, F.degree
    out: list[SolutionRecord] = []
    ylo, yhi = y_range or (1, box)
    ylo, yhi = max(ylo, 1), min(yhi, box)
    if (y_range is None or y_range[0] <= 0) and a <= abs(F.leading) <= b:
        out.append(SolutionRecord(LatticePoint(1, 0), abs(F.leading), "box"))
    stack = [(-box, box, ylo, yhi)] if ylo <= yhi else []
    while stack:
        x0, x1, y0, y1 = stack.pop()
        stats.nodes += 1
        lo, hi = _form_range(terms, n, x0, x1, y0, y1)
        if lo > b or hi < -b or (lo > -a and hi < a):
            continue
        w, h = x1 - x0 + 1, y1 - y0 + 1
        if w * h <= leaf_area:
            for y in range(y0, y1 + 1):
                for x in range(x0, x1 + 1):
                    stats.points += 1
                    v = abs(F(x, y))
                    if a <= v <= b and gcd(x, y) == 1:
                        out.append(SolutionRecord(LatticePoint(x, y), v, "box"))
            continue
        if w >= h:
            m = (x0 + x1) // 2
            stack.append((x0, m, y0, y1))
            stack.append((m + 1, x1, y0, y1))
        else:
            m = (y0 + y1) // 2
            stack.append((x0, x1, y0, m))
            stack.append((x0, x1, m + 1, y1))
    return merge(out)


# -- crossover -----------------------------------------------------------------------


@dataclass(frozen=True)
class Crossover:
    """Heights beyond which every solution approximates a real root within ``1/(2y^2)``."""

    y_side: int
    x_side: int

    @property
    def height(self) -> int:
        return max(self.y_side, self.x_side)

    def to_json(self) -> dict:
        return {"y_side": self.y_side, "x_side": self.x_side}


def _side_crossover(roots: Sequence[RootEnclosure], lead: int, n: int, b: int) -> int:
    if n < 3:
        raise ValueError("crossover needs degree >= 3")
    prec = max(r.precision for r in roots)
    worst = mpf(0)
    with interval_context(prec):
        [r.box() for r in roots]
        for i, r in enumerate(roots):
            # |f'(alpha_i)| >= |a_n| prod_j (|c_i - c_j| - r_i - r_j)
            prod = iv.mpf(abs(lead))
            for j, s in enumerate(roots):
                if j == i:
                    continue
                d = abs(iv.mpc(r.center.real, r.center.imag) - iv.mpc(s.center.real, s.center.imag))
                d = d - (r.radius + s.radius)
                if ends(d)[0] <= 0:
                    raise ArithmeticError("root discs too wide for a crossover bound")
                prod = prod * iv.mpf(ends(d)[0])
            c = iv.mpf(b) * 2 ** (n - 1) / iv.mpf(ends(prod)[0])
            if r.is_real:
                u = (2 * c) ** (iv.mpf(1) / (n - 2))
            else:
                im_lo, _ = r.imag_abs_bounds()
                if im_lo <= 0:
                    raise ArithmeticError("non-real root not separated from the real axis")
                u = (c / iv.mpf(im_lo)) ** (iv.mpf(1) / n)
            worst = max(worst, ends(u)[1])
        return int(mp.floor(worst))


def crossover(F: BinaryForm, b: int, precision: int = 256) -> Crossover:
    """Certified crossover heights for both dehomogenizations."""
    n = F.degree
    ry = certified_roots(F, precision, "x")
    rx = certified_roots(F, precision, "y")
    return Crossover(_side_crossover(ry, F.leading, n, b), _side_crossover(rx, F.trailing, n, b))


# -- continued fractions ------------------------------------------------------------


def convergents(q: Fraction, max_den: int) -> list[tuple[int, int]]:
    """Convergents ``(p, q)`` of a rational with ``0 < q <= max_den``."""
    num, den = q.numerator, q.denominator
    p0, q0, p1, q1 = 0, 1, 1, 0
    out = []
    while den:
        a, r = divmod(num, den)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > max_den:
            break
        out.append((p1, q1))
        num, den = den, r
    return out


def _real_root_fractions(root: RootEnclosure) -> tuple[Fraction, Fraction]:
    lo, hi = ends(root.real_interval())
    return to_fraction(lo), to_fraction(hi)


def _bits_for(height: int) -> int:
    return 2 * max(height, 2).bit_length() + 8


def real_root_convergents(root: RootEnclosure, max_den: int) -> set[tuple[int, int]]:
    """All ``(p, q)`` that can be convergents of the enclosed real root with ``q <= max_den``.

    The enclosure is narrower than ``1/(4 max_den^2)``, so its endpoints lie in
    the same or adjacent cells of the Farey sequence of that order, and the
    union of their convergents contains those of the root.
    """
    lo, hi = _real_root_fractions(root)
    if hi - lo >= Fraction(1, 4 * max_den * max_den):
        raise ArithmeticError("real-root enclosure too wide for convergent extraction")
    return set(convergents(lo, max_den)) | set(convergents(hi, max_den))


def enumerate_convergents(
    F: BinaryForm,
    a: int,
    b: int,
    y_max: int,
    x_max: int | None = None,
    sides: str = "xy",
    x_bound: int | None = None,
) -> list[SolutionRecord]:
    """Solutions among convergents (and their ``x +- 1`` neighbours) of real roots.

    Side ``y`` uses roots of ``F(z, 1)`` and denominators up to ``y_max``;
    side ``x`` uses roots of ``F(1, z)`` and denominators up to ``x_max``.
    ``x_bound`` optionally drops points with ``|x|`` above it.
    """
    a = max(a, 1)
    x_max = y_max if x_max is None else x_max
    found: list[SolutionRecord] = []
    for side, cap in (("x", y_max), ("y", x_max)):
        if (side == "x" and "y" not in sides) or (side == "y" and "x" not in sides) or cap < 1:
            continue
        lead = F.leading if side == "x" else F.trailing
        if lead == 0:
            continue
        roots = roots_for_bits(F, _bits_for(cap), side)
        for idx, r in enumerate(roots):
            if not r.is_real:
                continue
            for p, q in sorted(real_root_convergents(r, cap)):
                for dp in (-1, 0, 1):
                    num = p + dp
                    x, y = (num, q) if side == "x" else (q, num)
                    if gcd(x, y) != 1:
                        continue
                    if x_bound is not None and abs(x) > x_bound:
                        continue
                    v = abs(F(x, y))
                    if a <= v <= b:
                        rec = _record(F, x, y, "convergent")
                        found.append(replace(rec, root_index=idx))
    return merge(found)


# -- strips ------------------------------------------------------------------------


def _root_radius(F: BinaryForm, b: int, lead: int) -> int:
    """Integer ``rho >= (b/|lead|)^(1/n)``: some linear factor is at most rho at a solution."""
    n = F.degree
    num = b
    rho = 0
    while rho**n * abs(lead) < num:
        rho += 1
    # rho is the least integer with rho^n |lead| >= b
    return rho


def enumerate_strip(
    F: BinaryForm,
    a: int,
    b: int,
    y_lo: int,
    y_hi: int,
    side: str = "x",
    stats: SearchStats | None = None,
) -> list[SolutionRecord]:
    """All primitive solutions with ``y_lo <= y <= y_hi`` (side ``x``), for every ``x``.

    With side ``y`` the roles of the coordinates are swapped: the range is on
    ``|x|`` and every ``y`` is covered.
    """
    a = max(a, 1)
    stats = stats if stats is not None else SearchStats()
    G = F if side == "x" else F.swap()
    lead = G.leading
    if lead == 0:
        raise ValueError("strip search needs a nonzero leading coefficient on this side")
    rho = _root_radius(G, b, lead)
    roots = certified_roots(G, 256, "x")
    y_lo = max(y_lo, 1)
    out = []
    prec = max(r.precision for r in roots) + max(y_hi, 1).bit_length()
    with interval_context(prec):
        cen = [(iv.mpf(r.center.real), iv.mpf(abs(r.center.imag)), iv.mpf(r.radius)) for r in roots]
        for y in range(y_lo, y_hi + 1):
            xs: set[int] = set()
            for re, im, rad in cen:
                slack = rad * y
                if ends(im * y - slack)[0] > rho:
                    continue
                mid = re * y
                left = ends(mid - slack - rho)[0]
                right = ends(mid + slack + rho)[1]
                xs.update(range(int(mp.floor(left)), int(mp.ceil(right)) + 1))
            for x in xs:
                stats.points += 1
                if gcd(x, y) != 1:
                    continue
                v = abs(G(x, y))
                if a <= v <= b:
                    out.append((x, y, v))
    recs = []
    for x, y, v in out:
        p = (x, y) if side == "x" else (y, x)
        recs.append(_record(F, p[0], p[1], "strip"))
    return merge(recs)


# -- combined searches ---------------------------------------------------------------


def enumerate_hybrid(
    F: BinaryForm, a: int, b: int, box: int, stats: SearchStats | None = None
) -> tuple[list[SolutionRecord], Crossover]:
    """Box search up to the crossover height plus convergents out to ``box``.

    Every solution with ``max(|x|, |y|) <= box`` is found: one with ``y`` above
    the y-side crossover is a convergent of a real root of ``F(z, 1)``, one with
    ``|x|`` above the x-side crossover is a convergent of a root of ``F(1, z)``,
    and everything else lies in the small box.
    """
    cx = crossover(F, b)
    small = min(cx.height, box)
    part = enumerate_box(F, a, b, small, stats=stats)
    conv = enumerate_convergents(F, a, b, box, box, x_bound=box)
    conv = [r for r in conv if max(abs(r.x), abs(r.y)) <= box]
    return merge(part, conv), cx


@dataclass(frozen=True)
class RegionResult:
    """Solutions with ``y_lo <= y <= y_hi`` (all ``x``), and how far completeness is certified."""

    solutions: tuple[SolutionRecord, ...]
    y_lo: int
    y_hi: int
    complete: bool
    strip_height: int
    crossover: int

    def to_json(self) -> dict:
        return {
            "y_range": [int_to_str(self.y_lo), int_to_str(self.y_hi)],
            "complete": self.complete,
            "strip_height": int_to_str(self.strip_height),
            "crossover": int_to_str(self.crossover),
            "count": len(self.solutions),
        }


def enumerate_region(
    F: BinaryForm,
    a: int,
    b: int,
    y_lo: int,
    y_hi: int,
    strip_cap: int = 200_000,
    stats: SearchStats | None = None,
) -> RegionResult:
    """Complete search of ``y_lo <= y <= y_hi`` over all ``x`` (including ``y = 0`` if asked).

    Strips cover ``y`` up to the y-side crossover; convergents of the real
    roots of ``F(z, 1)`` cover the rest. When the crossover exceeds
    ``strip_cap`` the band between them is not searched and the result is
    marked incomplete.
    """
    a = max(a, 1)
    cy = _side_crossover(certified_roots(F, 256, "x"), F.leading, F.degree, b)
    recs: list[SolutionRecord] = []
    if y_lo <= 0 and a <= abs(F.leading) <= b:
        recs.append(SolutionRecord(LatticePoint(1, 0), abs(F.leading), "box"))
    strip_top = min(y_hi, cy, strip_cap)
    if strip_top >= max(y_lo, 1):
        recs.extend(enumerate_strip(F, a, b, max(y_lo, 1), strip_top, stats=stats))
    complete = strip_top >= min(y_hi, cy)
    if y_hi > strip_top:
        conv = enumerate_convergents(F, a, b, y_hi, sides="y")
        recs.extend(r for r in conv if max(y_lo, strip_top + 1) <= r.y <= y_hi)
    return RegionResult(tuple(merge(recs)), y_lo, y_hi, complete, strip_top, cy)
