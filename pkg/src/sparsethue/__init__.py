"""Exact solver and bound auditor for Thue inequalities ``|F(x, y)| <= h`` with sparse binary forms."""

from __future__ import annotations

from .analytic import (
    MahlerMeasure,
    check_mahler_bounds,
    hypothesis_thm1,
    hypothesis_thm2,
    mahler_measure,
    phi_of_imag,
    phi_profile,
    select_kappa,
    thresholds_part1,
    thresholds_part2,
)
from .audit import AuditReport, audit_part1, audit_part2, audit_phi_clustering, check_hypothesis_thm1, check_hypothesis_thm2
from .corpus import CorpusSpec, generate_corpus
from .enumerate import SolutionRecord, enumerate_box, enumerate_convergents, enumerate_hybrid, enumerate_strip
from .forms import BinaryForm, LatticePoint, UnimodularMap, apply_map, height, irreducibility_certificate, parse_form
from .logscale import Inconclusive, LogScaleReal
from .newton import build_candidate_set, newton_polygon, verify_candidate_property
from .resultants import discriminant
from .roots import RootEnclosure, certified_roots

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BinaryForm",
    "CorpusSpec",
    "Inconclusive",
    "LatticePoint",
    "LogScaleReal",
    "MahlerMeasure",
    "RootEnclosure",
    "SolutionRecord",
    "UnimodularMap",
    "apply_map",
    "audit_part1",
    "audit_part2",
    "audit_phi_clustering",
    "build_candidate_set",
    "certified_roots",
    "check_hypothesis_thm1",
    "check_hypothesis_thm2",
    "check_mahler_bounds",
    "discriminant",
    "enumerate_box",
    "enumerate_convergents",
    "enumerate_hybrid",
    "enumerate_strip",
    "generate_corpus",
    "height",
    "hypothesis_thm1",
    "hypothesis_thm2",
    "irreducibility_certificate",
    "mahler_measure",
    "newton_polygon",
    "parse_form",
    "phi_of_imag",
    "phi_profile",
    "select_kappa",
    "thresholds_part1",
    "thresholds_part2",
    "verify_candidate_property",
]
