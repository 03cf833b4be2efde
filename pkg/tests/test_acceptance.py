"""Acceptance suite: one test per criterion, each with its own runtime budget."""

from __future__ import annotations

import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest
from mpmath import iv, mp, mpc, mpf

from sparsethue.analytic import check_mahler_bounds, mahler_measure, phi_of_imag, threshold_R
from sparsethue.audit import audit_part1, audit_part2, audit_phi_clustering, check_hypothesis_thm1, check_hypothesis_thm2
from sparsethue.corpus import CorpusSpec, generate_corpus
from sparsethue.enumerate import enumerate_box, enumerate_hybrid, point_set
from sparsethue.forms import BinaryForm, UnimodularMap, apply_map, parse_form
from sparsethue.logscale import LogScaleReal, interval_context
from sparsethue.newton import build_candidate_set, verify_candidate_property
from sparsethue.resultants import discriminant
from sparsethue.roots import RootEnclosure, certified_roots


def _random_forms(count: int, seed: int) -> list[BinaryForm]:
    """Nonzero-discriminant forms of degree 2..8 with coefficients in [-50, 50], about a third of them zero."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, 8)
        coeffs = [0 if rng.random() < 0.35 else rng.randint(-50, 50) for _ in range(n + 1)]
        if coeffs[-1] == 0 and coeffs[0] == 0 or not any(coeffs):
            continue
        F = BinaryForm.from_dense(coeffs)
        if F.degree != n or discriminant(F).value == 0:
            continue
        out.append(F)
    return out


def _random_matrix(rng: random.Random, det_choices=(1, -1)) -> UnimodularMap:
    while True:
        A = UnimodularMap(*(rng.randint(-6, 6) for _ in range(4)))
        if A.det in det_choices:
            return A


@pytest.fixture(scope="module")
def forms200():
    return _random_forms(200, seed=2024)


@pytest.mark.criterion(1)
def test_exact_invariants(forms200):
    t0 = time.perf_counter()
    rng = random.Random(11)
    for F in forms200:
        D = discriminant(F)
        assert D.value == discriminant(F, method="cofactor").value
        A = _random_matrix(rng)
        assert discriminant(apply_map(F, A)).value == D.value
        B = _random_matrix(rng, det_choices=(-3, -2, 2, 3, 1, -1))
        n = F.degree
        assert discriminant(apply_map(F, B)).value == B.det ** (n * (n - 1)) * D.value
    assert time.perf_counter() - t0 <= 60


@pytest.mark.criterion(2)
def test_mahler_bounds(forms200):
    t0 = time.perf_counter()
    for F in forms200:
        rep = check_mahler_bounds(F)
        assert rep.discriminant_lower and rep.height_upper, str(F)
    M = mahler_measure(parse_form("x^3 - 2*y^3"))
    eps = Fraction(1, 10**20)
    assert 2 - eps <= M.lower <= M.upper <= 2 + eps
    assert time.perf_counter() - t0 <= 60


def _small_height_corpus(count_each: int, seed: int, n_range=(3, 7)):
    items = []
    for family in ("binomial", "trinomial"):
        items += generate_corpus(CorpusSpec(family, n_range, count_each, seed, (1, 2), target="thm2"))
    return items


@pytest.mark.criterion(3)
def test_hybrid_matches_box():
    t0 = time.perf_counter()
    items = _small_height_corpus(25, seed=3)
    assert len(items) == 50
    for it in items:
        assert check_hypothesis_thm2(it.form, it.h)["holds"]
        box = point_set(enumerate_box(it.form, 1, it.h, 10**4))
        hybrid, _ = enumerate_hybrid(it.form, 1, it.h, 10**4)
        assert point_set(hybrid) == box, it.ident
    assert time.perf_counter() - t0 <= 300


def _positive(records) -> set[tuple[int, int]]:
    return {(x, y) for x, y in point_set(records) if x > 0 and y > 0}


@pytest.mark.criterion(4)
def test_bennett_oracle():
    t0 = time.perf_counter()
    for a in range(2, 11):
        for n in range(3, 7):
            F = BinaryForm.from_terms(n, [(n, a + 1), (0, -a)])
            found, _ = enumerate_hybrid(F, 1, 1, 10**4)
            exact = {(x, y) for x, y in _positive(found) if F(x, y) == 1}
            assert exact == {(1, 1)}, (a, n, exact)
    assert time.perf_counter() - t0 <= 120


@pytest.mark.criterion(5)
def test_siegel_oracle():
    t0 = time.perf_counter()
    items = generate_corpus(CorpusSpec("siegel", (3, 6), 50, seed=5))
    assert len(items) == 50
    for it in items:
        found, _ = enumerate_hybrid(it.form, 1, it.h, 10**4)
        assert len(_positive(found)) <= 1, (it.ident, _positive(found))
    assert time.perf_counter() - t0 <= 120


PART2_HARD = (
    "psi_range",
    "psi_sum_and_eta_prime_product",
    "psi_sum_per_root",
    "small_count_40_sum_min1_phi",
)


@pytest.fixture(scope="module")
def part2_reports():
    items = []
    for family in ("binomial", "trinomial"):
        items += generate_corpus(CorpusSpec(family, (5, 7), 10, 6, (1, 2), target="thm2"))
    t0 = time.perf_counter()
    reports = [(it, audit_part2(it.form, it.h, form_id=it.ident)) for it in items]
    return reports, time.perf_counter() - t0


@pytest.mark.criterion(6)
def test_part2_audit(part2_reports):
    reports, elapsed = part2_reports
    assert len(reports) == 20
    profiles = 0
    for it, rep in reports:
        assert rep.hypotheses["thm2_height"] is True
        assert rep.passed, (it.ident, rep.violations)
        for band in rep.details["bands"]:
            if band.get("thresholds") is None:
                continue
            tag = f"band[{band['band'][0]},{band['band'][1]}]:"
            for name in PART2_HARD:
                assert rep.check(tag + name).passed
            profiles += len(band["profiles"])
        soft = rep.soft["total_per_sqrt_ns"]
        assert soft["threshold"] == 50.0 and "warn" in soft
    assert profiles > 0, "no psi profile was exercised"
    assert elapsed <= 600


@pytest.mark.criterion(7)
def test_part1_audit():
    t0 = time.perf_counter()
    items = generate_corpus(CorpusSpec("binomial", (5, 7), 5, 7, (1, 2), target="thm1"))
    assert len(items) == 5
    for it in items:
        hyp = check_hypothesis_thm1(it.form, it.h)
        assert hyp["holds"] is True and hyp["kappa"] == 2
        rep = audit_part1(it.form, it.h, form_id=it.ident)
        s = it.form.sparsity
        assert s == 1
        assert rep.check("small_total_12s+16").passed and rep.census["small"] <= 28
        assert rep.check("small_y_side_6s+9").passed and rep.census["small_y_side"] <= 15
        assert rep.check("small_x_side_6s+9").passed and rep.census["small_x_side"] <= 15
        assert rep.check("medium_interval_counts").passed
        assert rep.passed, (it.ident, rep.violations)
    assert time.perf_counter() - t0 <= 600


def _synthetic_root(re, im) -> RootEnclosure:
    return RootEnclosure(mpc(re, im), mpf(2) ** -400, False, None, "x", 512)


@pytest.mark.criterion(8)
def test_psi_phi_units(part2_reports):
    t0 = time.perf_counter()
    reports, _ = part2_reports
    for _, rep in reports:
        n = int(rep.invariants["n"])
        for band in rep.details["bands"]:
            for prof in band.get("profiles", []):
                for lo, hi in prof["psi"]:
                    assert (lo == hi == 0) or (1 / (2 * n) - 1e-12 <= lo and hi <= 1 + 1e-12)

    # Phi inverts M^(-Phi) = |Im alpha| on synthetic roots
    with mp.workprec(512):
        logM = mpf(40) * mp.log(10)
        for k in range(1, 20):
            phi = mpf(k) / 20
            im = mp.exp(-phi * logM)
            with interval_context(512):
                val = phi_of_imag(im, im, iv.mpf(logM))
            assert abs(val.lo - phi) < mpf(10) ** -30 and abs(val.hi - phi) < mpf(10) ** -30

    # the clustering cap on forms with M > e^(2n)
    items = []
    for family in ("binomial", "trinomial"):
        items += generate_corpus(CorpusSpec(family, (3, 8), 25, 8, (1,), target="thm2"))
    assert len(items) == 50
    for it in items:
        M = mahler_measure(it.form)
        assert M.log.log.a > 2 * it.form.degree
        res, info = audit_phi_clustering(it.form, M)
        assert res.passed and info["M_gt_e_2n"]
    assert time.perf_counter() - t0 <= 180


@pytest.mark.criterion(9)
def test_candidate_sets():
    t0 = time.perf_counter()
    items = generate_corpus(CorpusSpec("random-fewnomial", (3, 8), 40, 9))
    items += _small_height_corpus(10, seed=9)
    R = threshold_R
    for it in items:
        F = it.form
        roots = certified_roots(F)
        full = verify_candidate_property(range(len(roots)), roots)
        assert full.max_ratio == LogScaleReal.from_int(1)
        S = build_candidate_set(F, "S", roots)
        assert len(S) <= 6 * F.sparsity + 4
        assert verify_candidate_property(S, roots, R=R(F.degree)).passes_at_R
    assert time.perf_counter() - t0 <= 120


def _cli(*args: str) -> bytes:
    return subprocess.run(
        [sys.executable, "-m", "sparsethue", *args], check=False, capture_output=True
    ).stdout


@pytest.mark.criterion(10)
def test_determinism():
    runs = [
        ("audit", "--thm", "2", "--family", "trinomial", "--n", "5..6", "--count", "2", "--seed", "4", "--h-values", "1,2"),
        ("audit", "--thm", "1", "--family", "binomial", "--n", "5", "--count", "1", "--seed", "4"),
        ("corpus", "--family", "bennett", "--n", "4..6", "--count", "10", "--seed", "7"),
        ("enumerate", "x^3 - 2*y^3", "--h", "6", "--box", "2000"),
    ]
    for args in runs:
        first, second = _cli(*args), _cli(*args)
        assert first and first == second, args
