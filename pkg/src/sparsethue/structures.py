"""Size classes and per-solution structures for both counting arguments.

Part I works with the minimal solution, the distinguished root, the sets of
solutions close to each root and the shifted conjugates ``beta_i``. Part II
works with a normalized, locally reduced form, the piecewise exponents
``psi_i`` of each small solution, and the gap principle along each root.

Every comparison is decided on interval enclosures; an undecided comparison
raises :class:`Inconclusive` rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from mpmath import iv, mp, mpf
from sympy.core.intfunc import igcdex

from .analytic import (
    MahlerMeasure,
    Part1Thresholds,
    Part2Thresholds,
    PhiProfile,
    mahler_measure,
)
from .enumerate import SolutionRecord, enumerate_region
from .forms import BinaryForm, FormError, UnimodularMap, apply_map, height, int_to_str
from .logscale import Inconclusive, LogScaleReal, compare, ends, interval_context
from .roots import RootEnclosure, linear_form_box, map_roots, mapped_roots_for_bits, roots_for_bits


# -- small helpers -------------------------------------------------------------------


def _lt(a, b) -> bool | None:
    """Certified ``a < b`` on real intervals."""
    (alo, ahi), (blo, bhi) = ends(a), ends(b)
    if ahi < blo:
        return True
    if alo >= bhi:
        return False
    return None


def _le(a, b) -> bool | None:
    (alo, ahi), (blo, bhi) = ends(a), ends(b)
    if ahi <= blo:
        return True
    if alo > bhi:
        return False
    return None


def _decided(v: bool | None, what: str) -> bool:
    if v is None:
        raise Inconclusive(f"undecided comparison: {what}")
    return v


def _pair(v) -> tuple[float, float]:
    lo, hi = ends(v)
    return (float(mp.nstr(lo, 17)), float(mp.nstr(hi, 17)))


def _prec(roots: Sequence[RootEnclosure], *coords: int) -> int:
    bits = max([abs(c).bit_length() for c in coords] + [1])
    return max(r.precision for r in roots) + 2 * bits + 32


def roots_for_height(
    F: BinaryForm, y_max: int, side: str = "x", source: tuple[BinaryForm, UnimodularMap] | None = None
) -> tuple[RootEnclosure, ...]:
    """Root enclosures fine enough to separate linear forms from zero at points up to ``y_max``.

    At a point with ``F(x, y) != 0`` and coordinates at most ``Y``,
    ``|L_i(x, y)| >= 1 / (M(F) (2Y)^(n-1))`` and ``M(F) <= sqrt(n+1) H``; the
    quotients ``beta_i`` need that many bits twice over to be rounded reliably.
    With ``source = (F0, A)`` and ``F = F0 o A`` the roots are mapped from those of ``F0``.
    """
    ybits = max(int(y_max), 2).bit_length() + 1
    bits = 2 * (height(F).bit_length() + F.degree * ybits) + 64
    if source is not None:
        return mapped_roots_for_bits(source[0], source[1], bits)
    return roots_for_bits(F, bits, side)


def int_bounds(v: LogScaleReal) -> tuple[int, int]:
    """Integers ``(floor(lo), floor(hi))`` of a positive log-scale enclosure."""
    iv_ = v.to_interval()
    lo, hi = ends(iv_)
    return int(mp.floor(lo)), int(mp.floor(hi))


def certain_floor(v: LogScaleReal | int) -> int:
    if isinstance(v, int):
        return v
    lo, hi = int_bounds(v)
    if lo != hi:
        raise Inconclusive("integer part of the threshold is not determined")
    return lo


# -- size classes -------------------------------------------------------------------


def classify_part1(record: SolutionRecord, th: Part1Thresholds) -> tuple[str, tuple[str, ...]]:
    """``small`` if ``<x> <= Y_S`` (axis points included and flagged), ``medium`` if ``|x| <= Y_L``, else ``large``."""
    inner, outer = record.point.inner_norm, record.point.norm
    if inner == 0:
        return "small", ("axis",)
    c = compare(LogScaleReal.from_int(inner), th.Y_S, allow_equal=True)
    if c is None:
        raise Inconclusive("cannot compare <x> with Y_S")
    if c <= 0:
        return "small", ()
    c = compare(LogScaleReal.from_int(outer), th.Y_L, allow_equal=True)
    if c is None:
        raise Inconclusive("cannot compare |x| with Y_L")
    return ("medium" if c <= 0 else "large"), ()


def classify_part2(record: SolutionRecord, th: Part2Thresholds) -> tuple[str, tuple[str, ...]]:
    """``small`` if ``0 < y <= M^2`` (``y = 0`` counted small and flagged), else ``large``."""
    y = abs(record.y)
    if y == 0:
        return "small", ("axis",)
    if y <= th.M.lower * th.M.lower:
        return "small", ()
    if y > th.M.upper * th.M.upper:
        return "large", ()
    raise Inconclusive("y is within the uncertainty of M^2")


def _classify_or_mark(fn, record, th, strict: bool):
    try:
        return fn(record, th)
    except Inconclusive:
        if strict:
            raise
        return "undecided", ("undecided",)


def classify_records(
    records: Sequence[SolutionRecord],
    th1: Part1Thresholds | None,
    th2: Part2Thresholds | None,
    strict: bool = True,
) -> list[SolutionRecord]:
    """Attach size classes; with ``strict=False`` an undecidable class is labeled ``undecided``."""
    out = []
    for r in records:
        c1 = f1 = c2 = f2 = None
        if th1 is not None:
            c1, f1 = _classify_or_mark(classify_part1, r, th1, strict)
        if th2 is not None:
            c2, f2 = _classify_or_mark(classify_part2, r, th2, strict)
        flags = tuple(sorted(set(r.flags) | set(f1 or ()) | set(f2 or ())))
        out.append(replace(r, class1=c1, class2=c2, flags=flags))
    return out


# -- basis completion and the shifted conjugates beta_i -------------------------------


def basis_completion(x: int, y: int) -> tuple[int, int]:
    """``(x', y')`` with ``x' y - x y' = 1``."""
    u, v, g = igcdex(y, x)
    if g != 1:
        raise FormError(f"({x}, {y}) is not primitive")
    return int(u), int(-v)


@dataclass(frozen=True)
class BetaData:
    """``beta_i = -L_i(x', y') / L_i(x, y)`` and the anchoring integer ``m``."""

    point: tuple[int, int]
    complement: tuple[int, int]
    betas: tuple
    linear_forms: tuple
    anchor: int
    m: int
    precision: int
    tie: bool = False

    def shifted_abs(self, i: int, m: int | None = None):
        """Interval for ``|beta_i - m|``."""
        m = self.m if m is None else m
        with interval_context(self.precision):
            return abs(self.betas[i] - m)


def compute_betas(roots: Sequence[RootEnclosure], x: int, y: int, anchor: int | None = None) -> BetaData:
    """Shifted conjugates at a primitive point.

    With ``anchor`` given, ``m`` is the integer nearest to ``Re beta_anchor``;
    otherwise the anchor is the root with the largest ``|L_i(x, y)|`` (the one
    minimizing ``|L_i(1, 0) / L_i(x, y)|``).
    """
    xp, yp = basis_completion(x, y)
    prec = _prec(roots, x, y, xp, yp)
    with interval_context(prec):
        Lx = [linear_form_box(r, x, y) for r in roots]
        Lp = [linear_form_box(r, xp, yp) for r in roots]
        for L in Lx:
            if ends(abs(L))[0] <= 0:
                raise Inconclusive("linear form not separated from zero; refine the roots")
        betas = [-(b / a) for a, b in zip(Lx, Lp)]
        if anchor is None:
            mids = [ends(abs(L)) for L in Lx]
            anchor = max(range(len(roots)), key=lambda i: ((mids[i][0] + mids[i][1]) / 2, -i))
        lo, hi = ends(betas[anchor].real)
        m = int(mp.floor((lo + hi) / 2 + mpf(1) / 2))
        tie = False
        if hi - m > mpf(1) / 2 or m - lo > mpf(1) / 2:
            # Re beta straddles a half-integer: both neighbours are within 1/2 + width
            if hi - lo >= mpf(1) / 4:
                raise Inconclusive("Re beta is not resolved to within 1/4; refine the roots")
            m, tie = int(mp.floor(lo + mpf(1) / 2)), True
    return BetaData((x, y), (xp, yp), tuple(betas), tuple(Lx), anchor, m, prec, tie)


# -- Part I: minimal solution, the set A and the sets X_i -----------------------------


@dataclass(frozen=True)
class XiSets:
    minimal: tuple[int, int] | None
    distinguished_root: int | None
    exceptional: tuple[int, int] | None
    A: tuple[tuple[int, int], ...]
    members: tuple[tuple[tuple[int, int], ...], ...]
    close_counts: tuple[int, ...]
    Y_S_floor: int
    precision: int

    @property
    def is_empty(self) -> bool:
        return self.minimal is None

    def to_json(self) -> dict:
        pt = lambda p: None if p is None else [int_to_str(p[0]), int_to_str(p[1])]
        return {
            "minimal": pt(self.minimal),
            "distinguished_root": self.distinguished_root,
            "exceptional": pt(self.exceptional),
            "A": [pt(p) for p in self.A],
            "members": [[pt(p) for p in ms] for ms in self.members],
            "close_counts": list(self.close_counts),
        }


def _abs_L(root: RootEnclosure, x: int, y: int, prec: int):
    with interval_context(prec):
        return abs(linear_form_box(root, x, y))


def build_xi_sets(
    solutions: Sequence[tuple[int, int]], roots: Sequence[RootEnclosure], Y_S: LogScaleReal | int
) -> XiSets:
    """Minimal solution, distinguished root, the set A and ``X_i`` for solutions with ``0 <= y <= Y_S``.

    ``solutions`` must be every primitive solution with ``0 <= y <= Y_S``, with
    ``y >= 0``. Ties are broken by smallest ``y``, then smallest ``x``, and the
    distinguished root by lowest index.
    """
    n = len(roots)
    ys = certain_floor(Y_S)
    pts = sorted({(x, y) for x, y in solutions if 0 <= y <= ys}, key=lambda p: (p[1], p[0]))
    if not pts:
        return XiSets(None, None, None, (), tuple(() for _ in roots), tuple(0 for _ in roots), ys, 0)
    prec = _prec(roots, *[c for p in pts for c in p])
    x0 = pts[0]
    with interval_context(prec):
        L0 = [_abs_L(r, *x0, prec) for r in roots]
        mids = [sum(ends(v)) / 2 for v in L0]
        d1 = min(range(n), key=lambda i: (mids[i], i))
        # the argmin has to be certain unless the competitors are conjugates
        for j in range(n):
            if j != d1 and _lt(L0[j], L0[d1]) is None and roots[d1].conjugate_pair_index != j:
                if _le(L0[d1], L0[j]) is None:
                    raise Inconclusive("distinguished root not determined")
        half_ys = 1 / (2 * LogScaleReal.coerce(Y_S).to_interval())
        close = [[] for _ in range(n)]
        for p in pts:
            if p[1] == 0:
                continue
            for i, r in enumerate(roots):
                if _decided(_lt(_abs_L(r, *p, prec), half_ys), "|L_i| < 1/(2 Y_S)"):
                    close[i].append(p)
        star = [p for p in close[d1] if p != x0]
        exceptional = star[0] if star else None
        A = (x0,) if exceptional is None else (x0, exceptional)
        members = []
        for i, r in enumerate(roots):
            row = []
            for p in pts:
                if p in A or p[1] < 1:
                    continue
                bound = iv.mpf(1) / (2 * p[1])
                if _decided(_le(_abs_L(r, *p, prec), bound), "|L_i| <= 1/(2y)"):
                    row.append(p)
            members.append(tuple(row))
    return XiSets(x0, d1, exceptional, A, tuple(members), tuple(len(c) for c in close), ys, prec)


# -- check reports ---------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    note: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, **detail) -> None:
        self.violations.append({k: _jsonable(v) for k, v in detail.items()})

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "checked": self.checked, "violations": self.violations}
        if self.note:
            out["note"] = self.note
        return out


def _jsonable(v):
    if isinstance(v, tuple) and len(v) == 2 and all(isinstance(c, int) for c in v):
        return [int_to_str(v[0]), int_to_str(v[1])]
    if isinstance(v, (mpf, float)):
        return float(mp.nstr(mpf(v), 17))
    if isinstance(v, Fraction):
        return str(v)
    return v


def check_uniqueness(xi: XiSets) -> CheckResult:
    """At most one solution with ``0 < y <= Y_S`` and ``|L_i| < 1/(2 Y_S)`` per root."""
    res = CheckResult("close_solution_uniqueness")
    for i, c in enumerate(xi.close_counts):
        res.checked += 1
        if c > 1:
            res.fail(root=i, count=c)
    return res


def check_conjugate_symmetry(xi: XiSets, roots: Sequence[RootEnclosure]) -> CheckResult:
    res = CheckResult("conjugate_symmetry")
    for i, r in enumerate(roots):
        j = r.conjugate_pair_index
        if j is None or j < i:
            continue
        res.checked += 1
        if set(xi.members[i]) != set(xi.members[j]):
            res.fail(roots=[i, j])
    return res


def check_difference_identity(
    xi: XiSets, solutions: Sequence[tuple[int, int]], roots: Sequence[RootEnclosure]
) -> CheckResult:
    """``r_i - r_j = (beta_j - beta_i)(x0 y - x y0)`` with ``r_i = L_i(x0)/L_i(x)``, for all ``i, j``."""
    res = CheckResult("ratio_difference_identity")
    if xi.is_empty:
        return res
    x0 = xi.minimal
    n = len(roots)
    for p in solutions:
        if p == x0:
            continue
        bd = compute_betas(roots, *p, anchor=xi.distinguished_root)
        det = x0[0] * p[1] - p[0] * x0[1]
        with interval_context(bd.precision):
            ratios = [linear_form_box(r, *x0) / L for r, L in zip(roots, bd.linear_forms)]
            for i in range(n):
                for j in range(i + 1, n):
                    res.checked += 1
                    diff = (ratios[i] - ratios[j]) - (bd.betas[j] - bd.betas[i]) * det
                    if ends(diff.real)[0] > 0 or ends(diff.real)[1] < 0 or ends(diff.imag)[0] > 0 or ends(diff.imag)[1] < 0:
                        res.fail(point=p, roots=[i, j])
    return res


def check_xi_gaps(xi: XiSets, roots: Sequence[RootEnclosure], Y_S: LogScaleReal) -> CheckResult:
    """Consecutive ``X_i`` members: ``y2/y1 >= max(1, |beta_i - m|) / (2 Y_S + 7/3)``."""
    res = CheckResult("xi_gap")
    with interval_context():
        denom = 2 * Y_S.to_interval() + iv.mpf(7) / 3
    for i, chain in enumerate(xi.members):
        chain = sorted(chain, key=lambda p: (p[1], p[0]))
        for p1, p2 in zip(chain, chain[1:]):
            res.checked += 1
            bd = compute_betas(roots, *p1, anchor=xi.distinguished_root)
            with interval_context(bd.precision):
                lhs = iv.mpf(p2[1]) / p1[1]
                top = bd.shifted_abs(i)
                lo, hi = ends(top)
                factor = iv.mpf([max(lo, 1), max(hi, 1)])
                ok = _le(factor / denom, lhs)
            if not _decided(ok, "xi gap"):
                res.fail(root=i, pair=[p1, p2])
    return res


def check_far_betas(
    xi: XiSets, solutions: Sequence[tuple[int, int]], roots: Sequence[RootEnclosure], Y_S: LogScaleReal, h: int
) -> CheckResult:
    """For ``(x, y)`` outside A with ``|L_i| > 1/(2y)``: ``|m - beta_i| <= 7/2 + 2 h^(1/n) Y_S``."""
    res = CheckResult("far_root_beta_bound")
    if xi.is_empty:
        return res
    n = len(roots)
    with interval_context():
        bound = iv.mpf(7) / 2 + 2 * iv.mpf(h) ** (iv.mpf(1) / n) * Y_S.to_interval()
    for p in solutions:
        if p in xi.A or not 0 < p[1] <= xi.Y_S_floor:
            continue
        bd = compute_betas(roots, *p, anchor=xi.distinguished_root)
        with interval_context(bd.precision):
            for i in range(n):
                far = _lt(iv.mpf(1) / (2 * p[1]), abs(bd.linear_forms[i]))
                if not _decided(far, "|L_i| > 1/(2y)"):
                    continue
                res.checked += 1
                if not _decided(_le(bd.shifted_abs(i), bound), "beta bound"):
                    res.fail(point=p, root=i)
    return res


def check_translate_product(
    solutions: Sequence[tuple[int, int]],
    roots: Sequence[RootEnclosure],
    anchor: int | None,
    log_abs_D: LogScaleReal,
    h: int,
) -> CheckResult:
    """``prod max(1, |beta_i - m|) >= |D|^(1/(2n-2)) / (h n^n)`` at every solution."""
    res = CheckResult("translate_product_lower_bound")
    n = len(roots)
    with interval_context():
        rhs = log_abs_D.log / (2 * n - 2) - iv.log(h) - n * iv.log(n)
    ties = 0
    for p in solutions:
        bd = compute_betas(roots, *p, anchor=anchor)
        ties += bd.tie
        with interval_context(bd.precision):
            total = iv.mpf(0)
            for i in range(n):
                lo, hi = ends(bd.shifted_abs(i))
                total += iv.log(iv.mpf([max(lo, 1), max(hi, 1)]))
            res.checked += 1
            if not _decided(_le(rhs, total), "translate product"):
                res.fail(point=p)
    if ties:
        res.note = f"{ties} point(s) with Re beta at an unresolved half-integer; lower neighbour used"
    return res


# -- Part I medium solutions -------------------------------------------------------------


def _approx_rhs_log(th: Part1Thresholds, H: int, coord: int):
    """``ln`` of ``R (ns)^2 / H^(1/s - 1/n) ((4 e^3 s)^n h / coord^n)^(1/s)``."""
    n, s = th.n, th.s
    with interval_context():
        return (
            th.R.log
            + 2 * iv.log(n * s)
            - (iv.mpf(1) / s - iv.mpf(1) / n) * iv.log(H)
            + (n * (iv.log(4 * s) + 3) + iv.log(th.h) - n * iv.log(abs(coord))) / s
        )


def check_medium_intervals(
    F: BinaryForm,
    medium: Sequence[tuple[int, int]],
    th: Part1Thresholds,
    T: Sequence[int],
    T_star: Sequence[int],
    roots_x: Sequence[RootEnclosure],
    roots_y: Sequence[RootEnclosure],
) -> tuple[CheckResult, CheckResult, dict]:
    """Membership of each medium solution near some root of T or T*, and per-cell tallies.

    Solutions near ``alpha`` in T are binned by ``y`` into ``(Y_l, Y_(l+1)]``,
    those near ``alpha*`` in T* by ``|x|``; each cell is compared with the cap
    11 for the first interval and 2 for the others.
    """
    member = CheckResult("medium_root_proximity")
    cells = CheckResult("medium_interval_counts")
    tallies: dict[str, int] = {}
    H = height(F)
    if th.N is None:
        cells.note = "outside the regime n >= 4 s^(1 + 1/N)"
    levels = [lv.log for lv in th.Y_levels]

    def cell_of(coord: int) -> int | None:
        with interval_context():
            lc = iv.log(abs(coord))
        for ell in range(len(levels) - 1):
            above = _lt(levels[ell], lc)
            below = _le(lc, levels[ell + 1])
            if above is None or below is None:
                raise Inconclusive("medium solution on an interval boundary")
            if above and below:
                return ell
        return None

    for p in medium:
        x, y = p
        member.checked += 1
        hit = False
        for side, idx, roots, coord in (("T", T, roots_x, y), ("T*", T_star, roots_y, x)):
            if coord == 0:
                continue
            rhs = _approx_rhs_log(th, H, coord)
            for i in idx:
                r = roots[i]
                prec = _prec(roots, x, y)
                with interval_context(prec):
                    dist = abs(linear_form_box(r, x, y)) / abs(coord)
                    if ends(dist)[1] <= 0:
                        close = True
                    else:
                        close = _lt(iv.log(iv.mpf([max(ends(dist)[0], mpf(2) ** (-prec)), ends(dist)[1]])), rhs)
                if close:
                    hit = True
                    ell = cell_of(coord)
                    if ell is not None:
                        key = f"{side}:{i}:{ell}"
                        tallies[key] = tallies.get(key, 0) + 1
        if not hit:
            member.fail(point=p)
    N = th.N
    for key, count in sorted(tallies.items()):
        ell = int(key.rsplit(":", 1)[1])
        cap = 11 if ell == 0 else 2
        cells.checked += 1
        if N is not None and count > cap:
            cells.fail(cell=key, count=count, cap=cap)
    return member, cells, tallies


# -- Part II: normalized, locally reduced forms --------------------------------------------


@dataclass(frozen=True)
class ReducedContext:
    """A normalized equivalent form found by greedy descent on the Mahler measure.

    A point ``(v, w)`` of ``form`` corresponds to ``transform.apply((v, w))`` of
    the original form.
    """

    form: BinaryForm
    transform: UnimodularMap
    band: tuple[int, int]
    measure: MahlerMeasure
    steps: int
    converged: bool
    label: str = "locally-reduced"
    source: BinaryForm | None = None

    def roots(self, y_max: int) -> tuple[RootEnclosure, ...]:
        """Roots of the reduced form, mapped from the source form when it is known."""
        src = None if self.source is None else (self.source, self.transform)
        return roots_for_height(self.form, y_max, source=src)

    def to_json(self) -> dict:
        t = self.transform
        return {
            "form": str(self.form),
            "transform": [[int_to_str(t.a), int_to_str(t.b)], [int_to_str(t.c), int_to_str(t.d)]],
            "band": list(self.band),
            "M": self.measure.to_json(),
            "steps": self.steps,
            "converged": self.converged,
            "label": self.label,
        }


def normalizing_map(x: int, y: int) -> UnimodularMap:
    """Matrix with first column ``(x, y)``, so the image form takes ``F(x, y)`` at ``(1, 0)``."""
    xp, yp = basis_completion(x, y)
    return UnimodularMap(x, xp, y, yp)


def band_solutions(G: BinaryForm, a: int, b: int, M: MahlerMeasure) -> tuple[list[tuple[int, int]], bool]:
    up = M.upper * M.upper
    y_hi = -(-up.numerator // up.denominator)
    reg = enumerate_region(G, a, b, 1, y_hi)
    return [(r.x, r.y) for r in reg.solutions if r.y > 0], reg.complete


def local_reduction(
    F: BinaryForm, a: int, b: int, seed: tuple[int, int], max_steps: int = 50
) -> ReducedContext:
    """Normalize at ``seed`` and descend while some translate at a band solution has smaller M.

    A move replaces the current form ``G`` by ``G(v (x, y) + w (x', y'))``
    shifted by ``m`` in ``{m*-1, m*, m*+1}``, where ``m*`` is the anchor used
    for the profile at ``(x, y)``; only certified decreases are accepted.
    """
    if not a <= abs(F(*seed)) <= b:
        raise ValueError("seed is not a solution in the band")
    A = normalizing_map(*seed)
    G = apply_map(F, A)
    base_roots = roots_for_bits(F, 64)
    M = mahler_measure(G, roots=map_roots(base_roots, A))
    for step in range(max_steps):
        sols, _ = band_solutions(G, a, b, M)
        roots = roots_for_height(G, max([p[1] for p in sols] + [2]), source=(F, A))
        best = None
        for p in sols:
            try:
                bd = compute_betas(roots, *p)
            except Inconclusive:
                continue
            base = normalizing_map(*p)
            for m in (bd.m - 1, bd.m, bd.m + 1):
                B = base @ UnimodularMap.shear(m)
                AB = A @ B
                Mc = mahler_measure(apply_map(F, AB), roots=mapped_roots_for_bits(F, AB, 64))
                if Mc.upper < M.lower and (best is None or Mc.upper < best[1].upper):
                    best = (AB, Mc)
        if best is None:
            return ReducedContext(G, A, (a, b), M, step, True, source=F)
        A, M = best
        G = apply_map(F, A)
    return ReducedContext(G, A, (a, b), M, max_steps, False, "descent-capped", source=F)


# -- psi profiles ----------------------------------------------------------------------


@dataclass(frozen=True)
class PsiProfile:
    """Exponents ``psi_i`` with ``eta'_i = Q^psi_i`` at one solution of a normalized form."""

    point: tuple[int, int]
    anchor_root: int
    m: int
    pieces: tuple[str, ...]
    log_eta: tuple[tuple[float, float], ...]
    psi: tuple[tuple[float, float], ...]
    psi_sum: tuple[float, float]
    product_exceeds_Q: bool | None
    eta_prime_ok: bool | None
    form: str
    basis: tuple[int, int, int, int]
    m_tie: bool = False
    _log_eta_iv: tuple = field(default=(), repr=False, compare=False)
    _log_Q_iv: object = field(default=None, repr=False, compare=False)

    def positive(self, i: int) -> bool:
        return self.pieces[i] != "zero"

    def log_eta_prime(self, i: int):
        """Interval for ``ln eta'_i``."""
        kind = self.pieces[i]
        if kind == "zero":
            return iv.mpf(0)
        if kind == "full":
            return self._log_Q_iv
        return self._log_eta_iv[i]

    def invariants_hold(self, n: int) -> bool:
        lo_bound = 1.0 / (2 * n)
        for kind, (lo, hi) in zip(self.pieces, self.psi):
            if kind == "zero" and (lo, hi) != (0.0, 0.0):
                return False
            if kind == "full" and (lo, hi) != (1.0, 1.0):
                return False
            # mid pieces are certified by Q^(1/2n) <= eta < Q; the float view may round inward
            if kind == "mid" and (hi < lo_bound * (1 - 1e-12) or lo > 1 + 1e-12):
                return False
        return self.eta_prime_ok is True

    def to_json(self) -> dict:
        return {
            "point": [int_to_str(self.point[0]), int_to_str(self.point[1])],
            "anchor_root": self.anchor_root,
            "m": int_to_str(self.m),
            "m_tie": self.m_tie,
            "pieces": list(self.pieces),
            "psi": [list(p) for p in self.psi],
            "psi_sum": list(self.psi_sum),
            "product_eta_gt_Q": self.product_exceeds_Q,
            "product_eta_prime_ge_sqrtQ": self.eta_prime_ok,
            "form": self.form,
            "basis": [int_to_str(v) for v in self.basis],
        }


def psi_profile_for(
    G: BinaryForm, roots: Sequence[RootEnclosure], point: tuple[int, int], Q: LogScaleReal
) -> PsiProfile:
    """Piecewise exponents at ``point`` (with ``y > 0``) for the normalized form ``G``.

    ``eta_i = |beta_i - m| + 1``; ``eta'_i`` is ``Q`` when ``eta_i >= Q``,
    ``eta_i`` when ``Q^(1/2n) <= eta_i < Q`` and ``1`` otherwise.
    """
    x, y = point
    if y <= 0:
        raise ValueError("profiles are defined for y > 0")
    n = G.degree
    bd = compute_betas(roots, x, y)
    with interval_context(bd.precision):
        logQ = Q.log
        low = logQ / (2 * n)
        log_eta, pieces, psi = [], [], []
        for i in range(n):
            le = iv.log(bd.shifted_abs(i) + 1)
            log_eta.append(le)
            if _decided(_le(logQ, le), "eta_i >= Q"):
                pieces.append("full")
                psi.append(iv.mpf(1))
            elif _decided(_le(low, le), "eta_i >= Q^(1/2n)"):
                pieces.append("mid")
                psi.append(le / logQ)
            else:
                pieces.append("zero")
                psi.append(iv.mpf(0))
        total = sum(log_eta, iv.mpf(0))
        exceeds = _lt(logQ, total)
        eta_prime_total = sum(
            (logQ if k == "full" else le if k == "mid" else iv.mpf(0) for k, le in zip(pieces, log_eta)), iv.mpf(0)
        )
        ok = _le(logQ / 2, eta_prime_total)
        psi_sum = sum(psi, iv.mpf(0))
        psi_pairs = tuple((0.0, 0.0) if k == "zero" else (1.0, 1.0) if k == "full" else _pair(v) for k, v in zip(pieces, psi))
    xp, yp = bd.complement
    return PsiProfile(
        point=(x, y),
        anchor_root=bd.anchor,
        m=bd.m,
        pieces=tuple(pieces),
        log_eta=tuple(_pair(v) for v in log_eta),
        psi=psi_pairs,
        psi_sum=_pair(psi_sum),
        product_exceeds_Q=exceeds,
        eta_prime_ok=ok,
        form=str(G),
        basis=(x, xp, y, yp),
        m_tie=bd.tie,
        _log_eta_iv=tuple(log_eta),
        _log_Q_iv=logQ,
    )


def _h_root(h: int, n: int):
    return iv.mpf(h) ** (iv.mpf(1) / (2 * n))


def check_psi_profiles(profiles: Sequence[PsiProfile], n: int) -> tuple[CheckResult, CheckResult, CheckResult]:
    """Range of each psi_i, ``sum psi_i >= 1/2`` (equivalently ``prod eta' >= Q^(1/2)``) and ``prod eta > Q``."""
    rng = CheckResult("psi_range")
    half = CheckResult("psi_sum_and_eta_prime_product")
    big = CheckResult("eta_product_exceeds_Q")
    for p in profiles:
        rng.checked += 1
        if not all(
            (k == "zero" and v == (0.0, 0.0)) or (k == "full" and v == (1.0, 1.0)) or k == "mid"
            for k, v in zip(p.pieces, p.psi)
        ):
            rng.fail(point=p.point)
        half.checked += 1
        if p.eta_prime_ok is not True:
            half.fail(point=p.point, psi_sum=list(p.psi_sum))
        big.checked += 1
        if p.product_exceeds_Q is not True:
            big.fail(point=p.point)
    return rng, half, big


def check_ratio_lower_bounds(
    profiles: Sequence[PsiProfile], roots: Sequence[RootEnclosure], h: int
) -> tuple[CheckResult, CheckResult]:
    """``|1/L_i(x, y)|`` against both readings of the lower bound, with ``(x0, y0) = (1, 0)``.

    ``proof_final``: ``(eta_i - 3/2 - h^(1/2n)) y``; ``statement``:
    ``(Q^psi_i - 3/2 - h^(1/2n)) y``. The first implies the second.
    """
    proof = CheckResult("ratio_bound_eta_reading")
    stated = CheckResult("ratio_bound_psi_reading")
    for p in profiles:
        x, y = p.point
        n = len(p.pieces)
        prec = _prec(roots, x, y)
        with interval_context(prec):
            hr = _h_root(h, n)
            for i, r in enumerate(roots):
                inv_L = 1 / abs(linear_form_box(r, x, y))
                eta = iv.exp(p._log_eta_iv[i])
                eta_p = iv.exp(p.log_eta_prime(i))
                proof.checked += 1
                if not _decided(_le((eta - iv.mpf(3) / 2 - hr) * y, inv_L), "eta reading"):
                    proof.fail(point=p.point, root=i)
                stated.checked += 1
                if not _decided(_le((eta_p - iv.mpf(3) / 2 - hr) * y, inv_L), "psi reading"):
                    stated.fail(point=p.point, root=i)
    return proof, stated


def check_small_linear_forms(profiles: Sequence[PsiProfile], roots: Sequence[RootEnclosure]) -> CheckResult:
    """``|L_i(x, y)| < 1 / (Q^(psi_i/2) y)`` whenever ``psi_i > 0``."""
    res = CheckResult("small_linear_forms")
    for p in profiles:
        x, y = p.point
        prec = _prec(roots, x, y)
        with interval_context(prec):
            for i, r in enumerate(roots):
                if not p.positive(i):
                    continue
                res.checked += 1
                lhs = iv.log(abs(linear_form_box(r, x, y)))
                rhs = -p.log_eta_prime(i) / 2 - iv.log(y)
                if not _decided(_lt(lhs, rhs), "linear form bound"):
                    res.fail(point=p.point, root=i)
    return res


def root_chains(profiles: Sequence[PsiProfile], n: int) -> list[list[PsiProfile]]:
    """Per root, the profiles with ``psi_i > 0`` ordered by ``y``."""
    chains = []
    for i in range(n):
        chain = sorted((p for p in profiles if p.positive(i)), key=lambda p: (p.point[1], p.point[0]))
        chains.append(chain)
    return chains


def check_gap_principle(profiles: Sequence[PsiProfile], n: int) -> CheckResult:
    """Along each root: ``y_(j+1) > (2/3) Q^(psi_i(x_j, y_j)/2) y_j``."""
    res = CheckResult("gap_principle")
    for i, chain in enumerate(root_chains(profiles, n)):
        for p1, p2 in zip(chain, chain[1:]):
            res.checked += 1
            with interval_context():
                rhs = iv.log(iv.mpf(2) / 3) + p1.log_eta_prime(i) / 2 + iv.log(p1.point[1])
                ok = _lt(rhs, iv.log(p2.point[1]))
            if not _decided(ok, "gap principle"):
                res.fail(root=i, pair=[list(map(str, p1.point)), list(map(str, p2.point))])
    return res


def check_psi_sums(
    profiles: Sequence[PsiProfile], phi: PhiProfile, log_M, log_Q
) -> tuple[CheckResult, list[tuple[float, float]]]:
    """Per root: ``sum_x psi_i(x) < 10 min(1, Phi_i) ln M / ln Q``.

    When ``min(1, Phi_i) = 0`` the bound is read as requiring the sum to be 0.
    """
    res = CheckResult("psi_sum_per_root")
    n = len(phi.phis)
    sums = []
    with interval_context():
        ratio = log_M / log_Q
        for i in range(n):
            total = iv.mpf(0)
            for p in profiles:
                if not p.positive(i):
                    continue
                total += iv.mpf(1) if p.pieces[i] == "full" else p._log_eta_iv[i] / p._log_Q_iv
            sums.append(_pair(total))
            lo, hi = phi.phis[i].min1()
            res.checked += 1
            if hi == 0:
                if ends(total)[1] != 0:
                    res.fail(root=i, psi_sum=list(_pair(total)), bound=0.0)
                continue
            bound = 10 * iv.mpf([lo, hi]) * ratio
            if not _decided(_lt(total, bound), "psi sum bound"):
                res.fail(root=i, psi_sum=list(_pair(total)), bound=list(_pair(bound)))
    return res, sums
