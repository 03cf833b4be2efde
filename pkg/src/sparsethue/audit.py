"""Audits of solution counts and structural inequalities for one form.

An audit enumerates the solutions it can certify, classifies them, runs the
structural checks and compares counts against the explicit caps. Hard checks
carry an explicit numerical constant; lemma checks are certified structural
inequalities; soft metrics are ratios against a dashboard threshold and never
fail an audit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from math import isqrt, sqrt
from typing import Sequence

from mpmath import iv, mp, mpf

from .analytic import (
    MahlerMeasure,
    check_mahler_bounds,
    hypothesis_thm1,
    hypothesis_thm2,
    mahler_measure,
    phi_profile,
    select_kappa,
    thresholds_part1,
    thresholds_part2,
    threshold_R,
)
from .enumerate import (
    SolutionRecord,
    crossover,
    enumerate_convergents,
    enumerate_hybrid,
    enumerate_strip,
    merge,
)
from .forms import BinaryForm, FormError, LatticePoint, height, int_to_str
from .logscale import LogScaleReal, ends, interval_context
from .newton import build_candidate_set, verify_candidate_property
from .resultants import DiscriminantValue, discriminant
from .roots import certified_roots
from .structures import (
    CheckResult,
    ReducedContext,
    build_xi_sets,
    certain_floor,
    check_conjugate_symmetry,
    check_difference_identity,
    check_far_betas,
    check_gap_principle,
    check_medium_intervals,
    check_psi_profiles,
    check_psi_sums,
    check_ratio_lower_bounds,
    check_small_linear_forms,
    check_translate_product,
    check_uniqueness,
    check_xi_gaps,
    classify_records,
    local_reduction,
    psi_profile_for,
    roots_for_height,
    band_solutions,
)

SCHEMA_VERSION = "1.0"
SOFT_THRESHOLD = 50.0
DEFAULT_MEDIUM_CAP = 10**60
DEFAULT_SEARCH_BOX = 10**4


def big_number(v: int, max_digits: int = 60):
    """Decimal string for moderate integers, log-scale enclosure beyond ``max_digits``."""
    if abs(v) < 10**max_digits:
        return int_to_str(v)
    out = LogScaleReal.from_int(abs(v)).to_json()
    out["sign"] = -1 if v < 0 else 1
    return out


def _cap(name: str, found: int, cap: int | float) -> CheckResult:
    res = CheckResult(name, checked=1)
    if found > cap:
        res.fail(found=found, cap=cap)
    res.note = f"{found} <= {cap}"
    return res


def _cap_text(v: int) -> str:
    """``10^k`` for exact powers of ten, else the decimal string."""
    k = len(int_to_str(v)) - 1
    return f"10^{k}" if v == 10**k else int_to_str(v)


def _renamed(prefix: str, checks: Sequence[CheckResult]) -> list[CheckResult]:
    return [replace(c, name=f"{prefix}{c.name}") for c in checks]


@dataclass
class AuditReport:
    form_id: str
    form: str
    h: int
    theorem: int
    invariants: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)
    census: dict = field(default_factory=dict)
    hard: list = field(default_factory=list)
    lemmas: list = field(default_factory=list)
    soft: dict = field(default_factory=dict)
    partial: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    runtime: dict = field(default_factory=dict, compare=False)

    @property
    def violations(self) -> list[str]:
        return [c.name for c in self.hard + self.lemmas if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.violations

    def check(self, name: str) -> CheckResult:
        for c in self.hard + self.lemmas:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self, include_runtime: bool = False) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "form_id": self.form_id,
            "form": self.form,
            "h": self.h,
            "theorem": self.theorem,
            "invariants": self.invariants,
            "hypotheses": self.hypotheses,
            "census": self.census,
            "hard": [c.to_json() for c in self.hard],
            "lemmas": [c.to_json() for c in self.lemmas],
            "soft": self.soft,
            "partial": self.partial,
            "notes": self.notes,
            "details": self.details,
            "violations": self.violations,
            "passed": self.passed,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return out

    def dumps(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_json(include_runtime), sort_keys=True, indent=2)


# -- invariants and hypotheses ------------------------------------------------------------


def form_invariants(F: BinaryForm, D: DiscriminantValue | None = None, M: MahlerMeasure | None = None) -> dict:
    D = D or discriminant(F)
    out = {
        "n": F.degree,
        "s": F.sparsity,
        "H": big_number(height(F)),
        "D": big_number(D.value),
        "log_abs_D": D.log_abs.to_json() if D.value else None,
    }
    if D.value:
        M = M or mahler_measure(F)
        out["M"] = M.to_json()
    return out


def check_hypothesis_thm1(F: BinaryForm, h: int, kappa_max: int | None = None, D: DiscriminantValue | None = None) -> dict:
    """Certified truth value of the Part I height hypothesis and the kappa it admits."""
    if h < 1:
        raise ValueError("h must be a positive integer")
    D = D or discriminant(F)
    if D.value == 0:
        raise FormError("the discriminant vanishes")
    n, s = F.degree, F.sparsity
    holds = hypothesis_thm1(D, h, n, s)
    kappa = select_kappa(D, h, n, s, kappa_max) if holds else None
    return {"holds": holds, "kappa": kappa}


def check_hypothesis_thm2(F: BinaryForm, h: int, D: DiscriminantValue | None = None) -> dict:
    if h < 1:
        raise ValueError("h must be a positive integer")
    D = D or discriminant(F)
    if D.value == 0:
        raise FormError("the discriminant vanishes")
    return {"holds": hypothesis_thm2(D, h, F.degree)}


def _pt(p) -> list[str]:
    return [int_to_str(p[0]), int_to_str(p[1])]


# -- Part I -------------------------------------------------------------------------------


def _side_structures(prefix: str, G: BinaryForm, pts, Y_S, h: int, D: DiscriminantValue, ys: int):
    roots = roots_for_height(G, max(ys, 2))
    xi = build_xi_sets(pts, roots, Y_S)
    hard = _renamed(prefix, [check_uniqueness(xi), check_conjugate_symmetry(xi, roots)])
    lemmas = _renamed(
        prefix,
        [
            check_difference_identity(xi, pts, roots),
            check_xi_gaps(xi, roots, Y_S),
            check_far_betas(xi, pts, roots, Y_S, h),
            check_translate_product(pts, roots, xi.distinguished_root, D.log_abs, h),
        ],
    )
    return xi, roots, hard, lemmas


def audit_part1(
    F: BinaryForm,
    h: int,
    kappa_max: int | None = None,
    medium_cap: int = DEFAULT_MEDIUM_CAP,
    form_id: str = "",
) -> AuditReport:
    """Small-solution structure and counts, medium proximity cells, candidate root sets."""
    if not F.is_fewnomial:
        raise FormError("Part I audit needs nonzero x^n and y^n coefficients")
    n, s = F.degree, F.sparsity
    D = discriminant(F)
    rep = AuditReport(form_id, str(F), h, 1, invariants=form_invariants(F, D))
    hyp = check_hypothesis_thm1(F, h, kappa_max, D)
    rep.hypotheses = {"thm1_height": hyp["holds"], "kappa": hyp["kappa"]}
    if hyp["kappa"] is None:
        rep.notes.append("height hypothesis does not hold (or kappa exceeds the cap); audit not applicable")
        return rep
    th = thresholds_part1(F, h, hyp["kappa"], D=D)
    rep.details["thresholds"] = th.to_json()
    ys = certain_floor(th.Y_S)

    # small solutions: all x for 0 <= y <= Y_S, and all y for 0 <= |x| <= Y_S
    y_side = list(enumerate_strip(F, 1, h, 1, ys))
    if 1 <= abs(F.leading) <= h:
        y_side.append(SolutionRecord(LatticePoint(1, 0), abs(F.leading), "strip"))
    x_side = list(enumerate_strip(F, 1, h, 1, ys, side="y"))
    if 1 <= abs(F.trailing) <= h:
        x_side.append(SolutionRecord(LatticePoint(0, 1), abs(F.trailing), "strip"))
    y_side, x_side = merge(y_side), merge(x_side)
    small = merge(y_side, x_side)

    # medium: both coordinates above Y_S; beyond the crossover these are convergents
    cross = crossover(F, h)
    conv = enumerate_convergents(F, 1, h, medium_cap, medium_cap)
    beyond = [r for r in conv if r.point.inner_norm > ys]
    records = classify_records(merge(small, beyond), th, None)
    medium = [r for r in records if r.class1 == "medium"]
    large = [r for r in records if r.class1 == "large"]
    if max(cross.y_side, cross.x_side) > ys:
        rep.partial.append("medium search incomplete: crossover exceeds Y_S")
    rep.partial.append(f"medium solutions certified only for max(|x|,|y|) <= {_cap_text(medium_cap)}")
    rep.partial.append("large solutions are not enumerated")
    rep.census = {
        "small": len(small),
        "small_y_side": len(y_side),
        "small_x_side": len(x_side),
        "medium": len(medium),
        "large_found": len(large),
        "axis": sum(1 for r in records if "axis" in r.flags),
        "crossover": cross.to_json(),
        "Y_S_floor": int_to_str(ys),
    }
    rep.details["solutions"] = [r.to_json() for r in records]

    rep.hard += [
        _cap("small_total_12s+16", len(small), 12 * s + 16),
        _cap("small_total_2(6s+9)", len(small), 2 * (6 * s + 9)),
        _cap("small_y_side_6s+9", len(y_side), 6 * s + 9),
        _cap("small_x_side_6s+9", len(x_side), 6 * s + 9),
    ]

    # structures on each side; the x side works with the swapped form
    pts_y = [(r.x, r.y) for r in y_side]
    xi_y, roots_x, hard, lemmas = _side_structures("y_side:", F, pts_y, th.Y_S, h, D, ys)
    rep.hard += hard
    rep.lemmas += lemmas
    G = F.swap()
    pts_x = [tuple(LatticePoint(r.y, r.x).canonical()) for r in x_side]
    xi_x, _, hard, lemmas = _side_structures("x_side:", G, pts_x, th.Y_S, h, D, ys)
    rep.hard += hard
    rep.lemmas += lemmas
    rep.details["xi_y_side"] = xi_y.to_json()
    rep.details["xi_x_side"] = xi_x.to_json()

    # candidate root sets
    R = threshold_R(n)
    rx = certified_roots(F, 256, "x")
    ry = certified_roots(F, 256, "y")
    S = build_candidate_set(F, "S", rx, R)
    T = build_candidate_set(F, "T", rx, R)
    T_star = build_candidate_set(F, "T*", ry, R)
    S1 = S if xi_y.distinguished_root is None else S.with_root(xi_y.distinguished_root)
    s_check = verify_candidate_property(S, rx, R=R)
    rep.hard += [
        _cap("candidate_S_6s+4", len(S), 6 * s + 4),
        _cap("candidate_S1_6s+5", len(S1), 6 * s + 5),
        _cap("candidate_T_6s+4", len(T), 6 * s + 4),
        _cap("candidate_Tstar_6s+4", len(T_star), 6 * s + 4),
    ]
    pr = CheckResult("candidate_S_property_at_R", checked=s_check.samples)
    if not s_check.passes_at_R:
        pr.fail(max_ratio=s_check.max_ratio.to_json())
    rep.hard.append(pr)
    rep.details["candidates"] = {
        "S": S.to_json(),
        "S1": S1.to_json(),
        "T": T.to_json(),
        "T*": T_star.to_json(),
        "S_check": s_check.to_json(),
    }

    # medium proximity and interval tallies
    roots_y_fine = roots_for_height(F, medium_cap, "y")
    roots_x_fine = roots_for_height(F, medium_cap, "x")
    mem, cells, tallies = check_medium_intervals(
        F, [(r.x, r.y) for r in medium], th, T.indices, T_star.indices, roots_x_fine, roots_y_fine
    )
    in_regime = n >= 5 * s and th.N is not None
    if not in_regime:
        cells.note = "outside the n >= 5s regime; tallies reported only"
        rep.notes.append(cells.note)
        rep.lemmas.append(replace(cells, violations=[]))
    else:
        rep.hard.append(cells)
    rep.hard.append(mem)
    rep.details["medium_tallies"] = tallies

    rep.soft = _soft({"medium_per_s": len(medium) / s, "large_per_s": len(large) / s, "total_per_s": len(records) / s})
    return rep


def _soft(ratios: dict) -> dict:
    return {
        k: {"value": round(v, 12), "threshold": SOFT_THRESHOLD, "warn": v > SOFT_THRESHOLD}
        for k, v in sorted(ratios.items())
    }


# -- Part II ------------------------------------------------------------------------------


def split_bands(h: int) -> list[tuple[int, int]]:
    """``[1, floor(sqrt h)]`` and ``[floor(sqrt h) + 1, h]``; the second is dropped when empty."""
    r = isqrt(h)
    bands = [(1, r)]
    if r + 1 <= h:
        bands.append((r + 1, h))
    return bands


def audit_phi_clustering(F: BinaryForm, M: MahlerMeasure | None = None, roots=None, grid: int = 16) -> tuple[CheckResult, dict]:
    """Roots with ``0 < Im <= M^(-phi)`` against ``sqrt(8 n q / phi)``, ``q = 8s - 2``, on a phi grid."""
    n, s = F.degree, F.sparsity
    q = 8 * s - 2
    M = M or mahler_measure(F)
    roots = roots or certified_roots(F, 256, "x")
    logM = M.log.log
    with interval_context():
        e2n_ok = ends(logM)[0] > 2 * n
        regime_lo = 1700 * mp.log(n) ** 3 / n
    res = CheckResult("phi_clustering_cap")
    rows = []
    for k in range(1, grid + 1):
        phi = mpf(k) / grid
        certain = uncertain = 0
        with interval_context():
            thr = -iv.mpf(k) / grid * logM
            for r in roots:
                if r.is_real or r.center.imag <= 0:
                    continue
                lo, hi = r.imag_abs_bounds()
                if lo <= 0:
                    uncertain += 1
                    continue
                lim = iv.log(iv.mpf([lo, hi]))
                a, b = ends(lim)
                t_lo, t_hi = ends(thr)
                if b <= t_lo:
                    certain += 1
                elif a <= t_hi:
                    uncertain += 1
        cap = sqrt(8 * n * q / float(phi))
        res.checked += 1
        if certain + uncertain > cap:
            res.fail(phi=float(phi), count=certain + uncertain, cap=cap)
        rows.append(
            {
                "phi": float(phi),
                "count": certain,
                "undecided": uncertain,
                "cap": round(cap, 12),
                "in_regime": bool(phi >= regime_lo),
            }
        )
    if not e2n_ok:
        res.note = "M > e^(2n) not certified; counts reported only"
    else:
        res.note = "regime-vacuous: the phi range of the clustering bound is empty at this degree" if regime_lo > 1 else ""
    phis = phi_profile(roots, M)
    lo, hi = phis.min1_sum
    tail = 4 * sqrt(2 * n * q) + 1 - 8 * q
    info = {
        "q": q,
        "M_gt_e_2n": e2n_ok,
        "regime_lower_phi": float(regime_lo),
        "grid": rows,
        "sum_min1_phi": [float(lo), float(hi)],
        "tail_bound": round(tail, 12),
        "half_line_bound_2sqrt(2nq)": round(2 * sqrt(2 * n * q), 12),
    }
    return res, info


def _audit_band(
    F: BinaryForm, h: int, band: tuple[int, int], search_box: int, rep: AuditReport, D: DiscriminantValue
) -> dict:
    a, b = band
    n, _s = F.degree, F.sparsity
    tag = f"band[{a},{b}]:"
    found, _ = enumerate_hybrid(F, a, b, search_box)
    if not found:
        rep.partial.append(f"{tag} no solution with max(|x|,|y|) <= {search_box}; band audit vacuous")
        return {"band": [a, b], "seed": None, "solutions": 0}
    seed = (found[0].x, found[0].y)
    ctx: ReducedContext = local_reduction(F, a, b, seed)
    info = {"band": [a, b], "seed": _pt(seed), "reduction": ctx.to_json()}
    if not ctx.converged:
        rep.notes.append(f"{tag} local reduction did not settle within the step cap; band skipped")
        return info
    G, M = ctx.form, ctx.measure
    th = thresholds_part2(G, h, M=M, D=D)
    info["thresholds"] = th.to_json()
    sols, complete = band_solutions(G, a, b, M)
    if not complete:
        rep.partial.append(f"{tag} small-solution search incomplete (crossover above the strip cap)")
    small = sorted(sols, key=lambda p: (p[1], p[0]))
    roots = ctx.roots(max(th.Y_S_prime_upper, 2))
    profiles = [psi_profile_for(G, roots, p, th.Q) for p in small]
    phi = phi_profile(roots, M)
    rng, half, big = check_psi_profiles(profiles, n)
    sums_check, sums = check_psi_sums(profiles, phi, M.log.log, th.Q.log)
    lo, hi = phi.min1_sum
    count_check = CheckResult("small_count_40_sum_min1_phi", checked=1)
    count_check.note = f"{len(small)} <= 40 * [{float(lo)}, {float(hi)}]"
    if not len(small) <= 40 * lo:
        count_check.fail(found=len(small), bound=[float(40 * lo), float(40 * hi)])
    proof, stated = check_ratio_lower_bounds(profiles, roots, h)
    rep.hard += _renamed(tag, [rng, half, sums_check, count_check])
    rep.lemmas += _renamed(
        tag,
        [big, proof, stated, check_small_linear_forms(profiles, roots), check_gap_principle(profiles, n)],
    )
    # points of G map back to solutions of F in the band
    equiv = CheckResult(f"{tag}equivalence_back_map")
    back = []
    for p in [(1, 0)] + small:
        q = ctx.transform.apply(p).canonical()
        equiv.checked += 1
        if not a <= abs(F(q.x, q.y)) <= b:
            equiv.fail(point=p)
        back.append((q.x, q.y))
    rep.lemmas.append(equiv)
    # large solutions: convergents above M^2, reported only
    y_up = th.Y_S_prime_upper
    large = [r for r in enumerate_convergents(G, a, b, y_up * y_up, sides="y") if r.y > y_up]
    total_psi = sum(s_[1] for s_ in sums)
    info.update(
        {
            "small": len(small),
            "axis": 1,
            "large_found": len(large),
            "profiles": [p.to_json() for p in profiles],
            "phi": phi.to_json(),
            "psi_sums": [list(s_) for s_ in sums],
            "count_le_2_sum_psi": len(small) <= 2 * total_psi + 1e-9,
            "solutions_original": sorted(_pt(q) for q in back),
        }
    )
    rep.partial.append(f"{tag} large solutions searched only along convergents up to y <= M^4")
    return info


def audit_part2(F: BinaryForm, h: int, search_box: int = DEFAULT_SEARCH_BOX, form_id: str = "") -> AuditReport:
    """Per split band: locally reduced normalization, psi profiles, and the explicit caps."""
    n, s = F.degree, F.sparsity
    D = discriminant(F)
    M = mahler_measure(F)
    rep = AuditReport(form_id, str(F), h, 2, invariants=form_invariants(F, D, M))
    hyp = check_hypothesis_thm2(F, h, D)
    th = thresholds_part2(F, h, M=M, D=D)
    rep.hypotheses = {
        "thm2_height": hyp["holds"],
        "Q_ge_100^n_h": th.q_ge_100n_h,
        "M_gt_e^(2n)": th.M_gt_e_2n,
    }
    if not hyp["holds"]:
        rep.notes.append("height hypothesis does not hold; audit not applicable")
        return rep
    bands = []
    total = set()
    for band in split_bands(h):
        info = _audit_band(F, h, band, search_box, rep, D)
        bands.append(info)
        total.update(tuple(p) for p in info.get("solutions_original", []))
    rep.details["bands"] = bands
    clus, cinfo = audit_phi_clustering(F, M)
    if cinfo["M_gt_e_2n"]:
        rep.hard.append(clus)
    else:
        rep.lemmas.append(replace(clus, violations=[]))
    rep.details["phi_clustering"] = cinfo
    rep.census = {
        "found_total": len(total),
        "small_per_band": [b.get("small") for b in bands],
        "large_found_per_band": [b.get("large_found") for b in bands],
    }
    rep.soft = _soft({"total_per_sqrt_ns": len(total) / sqrt(n * s)})
    return rep


def mahler_report(F: BinaryForm) -> dict:
    return check_mahler_bounds(F).to_json()
