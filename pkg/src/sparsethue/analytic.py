"""Mahler measure enclosures, the scalar thresholds of both counting regimes, and Phi profiles.

Every logarithm is natural. Thresholds are :class:`LogScaleReal` enclosures so
that quantities like ``n^(800 log^2 n)`` can be compared without overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from mpmath import iv, mp, mpf

from .forms import BinaryForm, height
from .logscale import (
    Inconclusive,
    LogScaleReal,
    compare,
    ends,
    interval_context,
    ladder,
    rational_log,
    to_fraction,
)
from .resultants import DiscriminantValue, discriminant
from .roots import RootEnclosure, _isolate_cached

DEFAULT_A = Fraction(1, 100)
DEFAULT_B = Fraction(2, 100)


def _iv_frac(q: Fraction):
    return iv.mpf(q.numerator) / q.denominator


# -- Mahler measure --------------------------------------------------------------


@dataclass(frozen=True)
class MahlerMeasure:
    """Enclosure of M(F): exact rational endpoints plus the log-scale view."""

    lower: Fraction
    upper: Fraction
    log: LogScaleReal

    def to_json(self) -> dict:
        return {"approx": mp.nstr(mp.mpf(self.lower.numerator) / self.lower.denominator, 25), "log": self.log.to_json()}

    def contains(self, value: Fraction) -> bool:
        return self.lower <= value <= self.upper


def _mahler_terms(F: BinaryForm) -> tuple[tuple[int, int], ...]:
    # M is multiplicative and M(x) = M(y) = 1, so powers of x or y can be dropped
    shift = F.terms[0][0]
    return tuple((e - shift, a) for e, a in F.terms)


def mahler_measure(
    F: BinaryForm, roots: Sequence[RootEnclosure] | None = None, precision: int = 256
) -> MahlerMeasure:
    """``|c| prod max(1, |root|)`` enclosed by certified root discs."""
    terms = _mahler_terms(F)
    lead = abs(terms[-1][1])
    if roots is None:
        roots = _isolate_cached(terms, precision, "x") if terms[-1][0] > 0 else ()
    lo = Fraction(lead)
    hi = Fraction(lead)
    for r in roots:
        a, b = r.modulus_bounds()
        lo *= max(Fraction(1), to_fraction(a))
        hi *= max(Fraction(1), to_fraction(b))
    with interval_context(max(precision, 64)):
        log = LogScaleReal.from_log(iv.mpf([ends(rational_log(lo))[0], ends(rational_log(hi))[1]]))
    return MahlerMeasure(lo, hi, log)


@dataclass(frozen=True)
class MahlerBoundsReport:
    discriminant_lower: bool
    height_upper: bool
    height_lower: bool
    measure: MahlerMeasure
    precision: int

    @property
    def all_hold(self) -> bool:
        return self.discriminant_lower and self.height_upper and self.height_lower

    def to_json(self) -> dict:
        return {
            "discriminant_lower": self.discriminant_lower,
            "height_upper": self.height_upper,
            "height_lower": self.height_lower,
            "mahler": self.measure.to_json(),
        }


def _tri(lower_ok: bool, upper_fail: bool) -> bool | None:
    if lower_ok:
        return True
    if upper_fail:
        return False
    return None


def check_mahler_bounds(F: BinaryForm, D: DiscriminantValue | None = None) -> MahlerBoundsReport:
    """Check the discriminant lower bound and both height bounds on M(F).

    Comparisons are exact rational comparisons against the enclosure's
    endpoints, repeated at higher root precision while undecided.
    """
    n = F.degree
    D = D or discriminant(F)
    if D.value == 0:
        raise ValueError("Mahler bounds need a squarefree form")
    H = height(F)
    absD = abs(D.value)
    central = comb(n, n // 2)

    def attempt(prec: int):
        M = mahler_measure(F, precision=prec)
        # M >= (|D| / n^n)^(1/(2n-2))  <=>  M^(2n-2) n^n >= |D|
        d_ok = _tri(M.lower ** (2 * n - 2) * n**n >= absD, M.upper ** (2 * n - 2) * n**n < absD)
        # M <= sqrt(n+1) H  <=>  M^2 <= (n+1) H^2
        u_ok = _tri(M.upper**2 <= (n + 1) * H**2, M.lower**2 > (n + 1) * H**2)
        # H / C(n, n//2) <= M
        l_ok = _tri(H <= central * M.lower, H > central * M.upper)
        return M, d_ok, u_ok, l_ok

    for prec in (256, 1024, 4096):
        M, d_ok, u_ok, l_ok = attempt(prec)
        if None not in (d_ok, u_ok, l_ok):
            return MahlerBoundsReport(d_ok, u_ok, l_ok, M, prec)
    # still undecided: report an undecided inequality as not verified
    return MahlerBoundsReport(bool(d_ok), bool(u_ok), bool(l_ok), M, prec)


# -- thresholds -------------------------------------------------------------------


def threshold_R(n: int) -> LogScaleReal:
    """``R = n^(800 log^2 n)``, so ``ln R = 800 (ln n)^3``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    with interval_context():
        return LogScaleReal.from_log(800 * iv.log(n) ** 3)


def _lsr(q) -> LogScaleReal:
    return LogScaleReal.coerce(Fraction(q) if not isinstance(q, LogScaleReal) else q)


def _e_pow(x) -> LogScaleReal:
    with interval_context():
        return LogScaleReal.from_log(iv.mpf(x) if not isinstance(x, Fraction) else _iv_frac(x))


def denominator_thm1(n: int, s: int) -> LogScaleReal:
    """``(3R)^(n/2) (ns)^(2s+n)``."""
    return (threshold_R(n) * 3) ** Fraction(n, 2) * LogScaleReal.from_int(n * s) ** (2 * s + n)


def bound_kappa(D: DiscriminantValue, n: int, s: int, kappa: int | None) -> LogScaleReal:
    """Right-hand side of the kappa condition; ``kappa=None`` gives the limit as kappa grows."""
    expo = Fraction(1, 4 * (n - 1)) if kappa is None else 1 / (2 * (n - 1) * (2 + Fraction(1, kappa)))
    return D.log_abs**expo / denominator_thm1(n, s)


def hypothesis_thm1(D: DiscriminantValue, h: int, n: int, s: int) -> bool:
    """Certified truth value of ``h < |D|^(1/(4(n-1))) / ((3R)^(n/2) (ns)^(2s+n))``."""
    if h < 1:
        raise ValueError("h must be at least 1")
    if D.value == 0:
        return False

    def decide():
        c = compare(LogScaleReal.from_int(h), bound_kappa(D, n, s, None))
        return None if c is None else c < 0

    return ladder(decide)


def kappa_condition(D: DiscriminantValue, h: int, n: int, s: int, kappa: int) -> bool:
    def decide():
        c = compare(LogScaleReal.from_int(h), bound_kappa(D, n, s, kappa), allow_equal=True)
        return None if c is None else c <= 0

    return ladder(decide)


def select_kappa(D: DiscriminantValue, h: int, n: int, s: int, kappa_max: int | None = None) -> int | None:
    """Smallest integer ``kappa >= 2`` meeting the kappa condition, or None.

    None is returned when even the limiting condition fails, or when the
    smallest admissible kappa exceeds ``kappa_max``.
    """
    if h < 1:
        raise ValueError("h must be at least 1")
    if D.value == 0 or not hypothesis_thm1(D, h, n, s):
        return None
    # 1/(2(n-1)(2+1/k)) >= t  <=>  k >= 1/(1/(2(n-1)t) - 2), with t = ln(h * denom) / ln|D|
    with interval_context():
        t = (iv.log(h) + denominator_thm1(n, s).log) / D.log_abs.log
        bound = 1 / (1 / (2 * (n - 1) * t) - 2)
        guess = max(2, int(mp.floor(ends(bound)[0])))
    k = guess
    while k > 2 and kappa_condition(D, h, n, s, k - 1):
        k -= 1
    while not kappa_condition(D, h, n, s, k):
        k += 1
        if kappa_max is not None and k > kappa_max:
            return None
    if kappa_max is not None and k > kappa_max:
        return None
    return k


def medium_levels(n: int, s: int) -> int | None:
    """Number N of medium sub-intervals: 2 when ``n >= s^2``, else the least N with
    ``4 s^(1+1/N) <= n <= 4 s^(1+1/(N-1))``; None outside that regime."""
    if n >= s * s:
        return 2
    if s <= 1:
        return 2
    # 4 s^(1+1/N) <= n  <=>  (n/(4s))^N >= s, exact integer test
    for N in range(1, 64):
        lower_ok = Fraction(n, 4 * s) ** N >= s
        upper_ok = N == 1 or Fraction(n, 4 * s) ** (N - 1) <= s
        if lower_ok and upper_ok:
            return N
        if lower_ok:
            break
    return None


@dataclass(frozen=True)
class Part1Thresholds:
    n: int
    s: int
    h: int
    kappa: int
    a: Fraction
    b: Fraction
    lam: tuple[float, float]
    R: LogScaleReal
    C: LogScaleReal
    Y_S: LogScaleReal
    Y_L: LogScaleReal
    K: LogScaleReal
    N: int | None
    Y_levels: tuple[LogScaleReal, ...]
    bound_kappa_limit: LogScaleReal
    bound_kappa: LogScaleReal

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "h": self.h,
            "kappa": self.kappa,
            "a": str(self.a),
            "b": str(self.b),
            "lambda": list(self.lam),
            "R": self.R.to_json(),
            "C": self.C.to_json(),
            "Y_S": self.Y_S.to_json(),
            "Y_L": self.Y_L.to_json(),
            "K": self.K.to_json(),
            "N": self.N,
            "Y_levels": [y.to_json() for y in self.Y_levels],
            "bound_kappa_limit": self.bound_kappa_limit.to_json(),
            "bound_kappa": self.bound_kappa.to_json(),
        }


def lambda_interval(n: int, a: Fraction = DEFAULT_A, b: Fraction = DEFAULT_B):
    """``lambda = sqrt(2(n + a^2)) / (1 - b)`` as an interval."""
    with interval_context():
        return iv.sqrt(2 * (n + _iv_frac(Fraction(a) ** 2))) / _iv_frac(1 - Fraction(b))


def thresholds_part1(
    F: BinaryForm,
    h: int,
    kappa: int,
    a: Fraction = DEFAULT_A,
    b: Fraction = DEFAULT_B,
    D: DiscriminantValue | None = None,
) -> Part1Thresholds:
    a, b = Fraction(a), Fraction(b)
    if not 0 < a < b < 1:
        raise ValueError("need 0 < a < b < 1")
    if kappa < 2:
        raise ValueError("kappa must be an integer greater than 1")
    n, s = F.degree, F.sparsity
    H = height(F)
    D = D or discriminant(F)
    lam = lambda_interval(n, a, b)
    with interval_context():
        gap = n - lam
        if ends(gap)[0] <= 0:
            raise ValueError("n - lambda must be positive; choose smaller a, b")
        R = threshold_R(n)
        with interval_context():
            two_h_root = iv.log(2 * H) + iv.log(n * (n + 1)) / 2
        C = R * h * LogScaleReal.from_log(n * two_h_root)
        Y_S = _e_pow(6) * s * LogScaleReal.from_int(n * s) ** Fraction(2 * s, n) * LogScaleReal.from_int(h) ** Fraction(
            1, kappa * n
        )
        inner = LogScaleReal.from_log(iv.log(4 * H) + iv.log(n + 1) / 2 + iv.mpf(n) / 2)
        Y_L = (C * 2) ** (1 / gap) * inner ** (lam / (gap * _iv_frac(a * a)))
        K = (
            R
            * 2
            * (n * s) ** 2
            * (_e_pow(3) * 4 * s) ** Fraction(n, s)
            * LogScaleReal.from_int(h) ** Fraction(1, s)
        )
        N = medium_levels(n, s)
        levels: list[LogScaleReal] = [Y_S]
        if N is not None:
            Hl = LogScaleReal.from_int(H)
            for ell in range(1, N + 1):
                expo = 1 / (iv.mpf(s) ** (1 - iv.mpf(ell - 1) / N))
                levels.append(Y_S * Hl**expo)
        levels.append(Y_L)
        lam_lo, lam_hi = ends(lam)
    return Part1Thresholds(
        n=n,
        s=s,
        h=h,
        kappa=kappa,
        a=a,
        b=b,
        lam=(float(lam_lo), float(lam_hi)),
        R=R,
        C=C,
        Y_S=Y_S,
        Y_L=Y_L,
        K=K,
        N=N,
        Y_levels=tuple(levels),
        bound_kappa_limit=bound_kappa(D, n, s, None),
        bound_kappa=bound_kappa(D, n, s, kappa),
    )


def hypothesis_thm2(D: DiscriminantValue, h: int, n: int) -> bool:
    """Exact test of ``0 < h < |D|^(1/(4(n-1))) / (10^n n^(n/(4(n-1))))``.

    Raising both sides to the power ``4(n-1)`` turns it into the integer
    comparison ``h^(4(n-1)) 10^(4n(n-1)) n^n < |D|``.
    """
    if h < 1:
        raise ValueError("h must be at least 1")
    return h ** (4 * (n - 1)) * 10 ** (4 * n * (n - 1)) * n**n < abs(D.value)


@dataclass(frozen=True)
class Part2Thresholds:
    n: int
    h: int
    M: MahlerMeasure
    Q: LogScaleReal
    Y_S_prime: LogScaleReal
    Y_S_prime_upper: int
    height_hypothesis: bool
    q_ge_100n_h: bool
    h_lt_sqrtM_over_10n: bool
    M_gt_e_2n: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "h": self.h,
            "M": self.M.to_json(),
            "Q": self.Q.to_json(),
            "Y_S_prime": self.Y_S_prime.to_json(),
            "height_hypothesis": self.height_hypothesis,
            "Q_ge_100^n_h": self.q_ge_100n_h,
            "h_lt_M^(1/2)/10^n": self.h_lt_sqrtM_over_10n,
            "M_gt_e^(2n)": self.M_gt_e_2n,
        }


def thresholds_part2(
    F: BinaryForm, h: int, M: MahlerMeasure | None = None, D: DiscriminantValue | None = None
) -> Part2Thresholds:
    if h < 1:
        raise ValueError("h must be at least 1")
    n = F.degree
    D = D or discriminant(F)
    M = M or mahler_measure(F)
    Q = M.log / h
    Y2 = M.log * M.log
    # Q >= 100^n h  <=>  M >= 100^n h^2; certified from the lower endpoint
    q_ok = M.lower >= 100**n * h * h
    implied = M.lower > 100**n * h * h
    with interval_context():
        e2n = ends(iv.exp(iv.mpf(2 * n)))[1]
    big = M.lower > to_fraction(e2n)
    # integer ceiling of M^2 for use as an enumeration height
    up = M.upper * M.upper
    y_up = -(-up.numerator // up.denominator)
    return Part2Thresholds(n, h, M, Q, Y2, y_up, hypothesis_thm2(D, h, n), q_ok, implied, big)


# -- Phi profile -------------------------------------------------------------------


@dataclass(frozen=True)
class PhiValue:
    """Phi for one root: ``inf`` for real roots, else an interval ``[lo, hi]``."""

    lo: mpf
    hi: mpf

    @property
    def is_infinite(self) -> bool:
        return self.lo == mp.inf

    def min1(self) -> tuple[mpf, mpf]:
        return min(mpf(1), self.lo), min(mpf(1), self.hi)

    def to_json(self):
        if self.is_infinite:
            return "inf"
        return [float(self.lo), float(self.hi)]


@dataclass(frozen=True)
class PhiProfile:
    phis: tuple[PhiValue, ...]

    @property
    def min1_sum(self) -> tuple[mpf, mpf]:
        lo = sum((p.min1()[0] for p in self.phis), mpf(0))
        hi = sum((p.min1()[1] for p in self.phis), mpf(0))
        return lo, hi

    def to_json(self) -> dict:
        lo, hi = self.min1_sum
        return {"phi": [p.to_json() for p in self.phis], "sum_min1": [float(lo), float(hi)]}


def phi_of_imag(im_lo: mpf, im_hi: mpf, log_M) -> PhiValue:
    """Phi for ``|Im alpha|`` in ``[im_lo, im_hi]`` given ``ln M`` as an interval."""
    if im_hi == 0:
        return PhiValue(mp.inf, mp.inf)
    if im_lo > 1:
        return PhiValue(mpf(0), mpf(0))
    if im_hi <= 1 and im_lo > 0:
        with interval_context():
            v = -iv.log(iv.mpf([im_lo, im_hi])) / log_M
            lo, hi = ends(v)
        return PhiValue(max(lo, mpf(0)), hi)
    raise Inconclusive("|Im alpha| cannot be separated from 1 or 0 at this precision")


def phi_profile(roots: Sequence[RootEnclosure], M: LogScaleReal | MahlerMeasure) -> PhiProfile:
    """Per-root Phi: ``M^(-Phi) = |Im alpha|`` for ``0 < |Im alpha| <= 1``."""
    logM = M.log.log if isinstance(M, MahlerMeasure) else M.log
    with interval_context():
        if ends(logM)[0] <= 0:
            raise ValueError("Phi needs M > 1")
    out = []
    for r in roots:
        if r.is_real:
            out.append(PhiValue(mp.inf, mp.inf))
            continue
        lo, hi = r.imag_abs_bounds()
        out.append(phi_of_imag(lo, hi, logM))
    return PhiProfile(tuple(out))
