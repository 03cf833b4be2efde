"""Newton polygon of a fewnomial, root annuli, and candidate root sets.

For ``p(z) = sum a_k z^k`` the lower convex hull of the points
``(k, -ln|a_k|)`` has edges whose slopes are the logarithms of the typical
root moduli, each edge carrying as many roots as its horizontal span.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from mpmath import mp, mpf

from .forms import BinaryForm, FormError
from .logscale import LogScaleReal, compare, ends, int_log, interval_context
from .roots import RootEnclosure, certified_roots


@dataclass(frozen=True)
class PolygonEdge:
    left: int
    right: int
    log_radius: mpf

    @property
    def multiplicity(self) -> int:
        return self.right - self.left


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[tuple[int, mpf], ...]
    edges: tuple[PolygonEdge, ...]

    @property
    def slopes(self) -> list[mpf]:
        return [e.log_radius for e in self.edges]

    @property
    def multiplicities(self) -> list[int]:
        return [e.multiplicity for e in self.edges]

    def to_json(self) -> dict:
        return {
            "vertices": [[k, float(v)] for k, v in self.vertices],
            "edges": [{"span": [e.left, e.right], "log_radius": float(e.log_radius)} for e in self.edges],
        }


def _mid_log(a: int) -> mpf:
    lo, hi = ends(int_log(a))
    return (lo + hi) / 2


def newton_polygon_of(terms: Sequence[tuple[int, int]]) -> NewtonPolygon:
    """Lower hull of ``(k, -ln|a_k|)`` for sparse ascending ``(k, a_k)`` terms."""
    pts = [(k, -_mid_log(a)) for k, a in terms]
    if pts[0][0] != 0:
        raise FormError("Newton polygon needs a nonzero constant term")
    hull: list[tuple[int, mpf]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    edges = tuple(
        PolygonEdge(hull[i][0], hull[i + 1][0], (hull[i + 1][1] - hull[i][1]) / (hull[i + 1][0] - hull[i][0]))
        for i in range(len(hull) - 1)
    )
    return NewtonPolygon(tuple(hull), edges)


def _side_terms(F: BinaryForm, side: str):
    n = F.degree
    if side == "x":
        return tuple(F.terms)
    return tuple(sorted((n - e, a) for e, a in F.terms))


def newton_polygon(F: BinaryForm, side: str = "x") -> NewtonPolygon:
    if not F.is_fewnomial:
        raise FormError("Newton polygon needs both x^n and y^n terms")
    return newton_polygon_of(_side_terms(F, side))


@dataclass(frozen=True)
class RootAnnulus:
    log_radius: mpf
    members: tuple[int, ...]
    width_factor: mpf

    def to_json(self) -> dict:
        return {"log_radius": float(self.log_radius), "members": list(self.members), "width_factor": float(self.width_factor)}


def _log_modulus(r: RootEnclosure) -> mpf:
    lo, hi = r.modulus_bounds()
    return mp.log((lo + hi) / 2)


def cluster_roots(polygon: NewtonPolygon, roots: Sequence[RootEnclosure]) -> list[RootAnnulus]:
    """Assign roots to annuli in order of modulus, edge by edge.

    Edges are sorted by increasing radius, so the k smallest roots go to the
    first edge of span k, and so on; the width factor records the largest
    ratio between a member's modulus and the annulus radius.
    """
    if sum(polygon.multiplicities) != len(roots):
        raise ValueError("polygon multiplicities do not match the number of roots")
    order = sorted(range(len(roots)), key=lambda i: _log_modulus(roots[i]))
    out = []
    pos = 0
    for edge in polygon.edges:
        members = tuple(sorted(order[pos : pos + edge.multiplicity]))
        pos += edge.multiplicity
        dev = max((abs(_log_modulus(roots[i]) - edge.log_radius) for i in members), default=mpf(0))
        out.append(RootAnnulus(edge.log_radius, members, mp.exp(dev)))
    return out


# -- candidate root sets -----------------------------------------------------------


@dataclass(frozen=True)
class CandidateRootSet:
    kind: str
    indices: tuple[int, ...]
    bound: int

    def __len__(self) -> int:
        return len(self.indices)

    def with_root(self, i: int) -> CandidateRootSet:
        """The set enlarged by one root (bound grows by one)."""
        idx = tuple(sorted(set(self.indices) | {i}))
        return CandidateRootSet(self.kind + "1", idx, self.bound + 1)

    def to_json(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices), "size": len(self.indices), "bound": self.bound}


@dataclass(frozen=True)
class CandidateCheck:
    max_ratio: LogScaleReal
    witness: mpf | None
    passes_at_R: bool
    samples: int

    def to_json(self) -> dict:
        return {
            "max_ratio": self.max_ratio.to_json(),
            "witness": None if self.witness is None else mp.nstr(self.witness, 15),
            "passes_at_R": self.passes_at_R,
            "samples": self.samples,
        }


def sample_grid(roots: Sequence[RootEnclosure], sweep: int = 8) -> list[mpf]:
    """Deterministic real sample points derived from the root geometry."""
    pts = {mpf(0)}
    reals = sorted({r.center.real for r in roots})
    pts.update(reals)
    for u, v in zip(reals, reals[1:]):
        pts.add((u + v) / 2)
    for r in roots:
        rho = abs(r.center)
        if rho == 0:
            continue
        for k in range(-sweep, sweep + 1):
            t = rho * mpf(2) ** (mpf(k) / 4)
            pts.add(t)
            pts.add(-t)
    return sorted(pts)


def _ratio_at(zeta: mpf, subset: Sequence[int], roots: Sequence[RootEnclosure]) -> mpf:
    dists = [abs(zeta - r.center) for r in roots]
    all_min = min(dists)
    sub_min = min(dists[i] for i in subset)
    if all_min == 0:
        return mpf(1) if sub_min == 0 else mp.inf
    return sub_min / all_min


def verify_candidate_property(
    subset: Sequence[int] | CandidateRootSet,
    roots: Sequence[RootEnclosure],
    samples: Sequence[mpf] | None = None,
    R: LogScaleReal | None = None,
) -> CandidateCheck:
    """Largest observed ``min_{S}|zeta - alpha| / min_all |zeta - alpha|`` over real samples."""
    idx = tuple(subset.indices if isinstance(subset, CandidateRootSet) else subset)
    if not idx:
        raise ValueError("candidate set must be nonempty")
    if not roots:
        raise ValueError("no roots")
    prec = max(r.precision for r in roots)
    with mp.workprec(prec):
        grid = list(samples) if samples is not None else sample_grid(roots)
        worst = mpf(1)
        witness = None
        for z in grid:
            q = _ratio_at(z, idx, roots)
            if q > worst:
                worst, witness = q, z
        if worst == mp.inf:
            ratio = LogScaleReal(1, mp.inf, mp.inf)
        elif worst == 1:
            ratio = LogScaleReal.from_int(1)
        else:
            with interval_context(prec):
                ratio = LogScaleReal.coerce(worst)
    if R is None:
        passes = True if worst != mp.inf else False
    else:
        passes = compare(ratio, R, allow_equal=True) in (-1, 0)
    return CandidateCheck(ratio, witness, passes, len(grid))


def build_candidate_set(
    F: BinaryForm,
    kind: str = "S",
    roots: Sequence[RootEnclosure] | None = None,
    R: LogScaleReal | None = None,
) -> CandidateRootSet:
    """Annulus-representative candidate set, enlarged greedily until the sampled property holds.

    Every real root is included (a real sample at an omitted real root makes the
    ratio unbounded), plus the conjugate pair of smallest ``|Im|`` from each
    annulus. Kinds ``S`` and ``T`` use roots of ``F(z, 1)``, kind ``T*`` those of ``F(1, z)``.
    """
    from .analytic import threshold_R

    if kind not in ("S", "T", "T*"):
        raise ValueError("kind must be S, T or T*")
    side = "y" if kind == "T*" else "x"
    roots = tuple(roots) if roots is not None else certified_roots(F, side=side)
    s = F.sparsity
    cap = 6 * s + 4
    R = R or threshold_R(F.degree)
    chosen: set[int] = {i for i, r in enumerate(roots) if r.is_real}
    for ann in cluster_roots(newton_polygon(F, side), roots):
        complex_members = [i for i in ann.members if not roots[i].is_real]
        if complex_members:
            best = min(complex_members, key=lambda i: (abs(roots[i].center.imag), i))
            chosen.add(best)
            pair = roots[best].conjugate_pair_index
            if pair is not None:
                chosen.add(pair)
    while True:
        if len(chosen) > cap:
            raise ValueError(f"candidate set exceeds the cap {cap}")
        check = verify_candidate_property(sorted(chosen), roots, R=R)
        if check.passes_at_R:
            return CandidateRootSet(kind, tuple(sorted(chosen)), cap)
        z = check.witness
        rest = [i for i in range(len(roots)) if i not in chosen]
        nearest = min(rest, key=lambda i: (abs(z - roots[i].center), i))
        chosen.add(nearest)
        pair = roots[nearest].conjugate_pair_index
        if pair is not None and len(chosen) < cap:
            chosen.add(pair)
