"""Command line entry point.

Subcommands: ``invariants``, ``enumerate``, ``classify``, ``audit``, ``corpus``.
Exit status is 0 when every hard check passes, 2 when an audit reports a
violation, and 1 for usage or precision errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .analytic import mahler_measure, select_kappa, thresholds_part1, thresholds_part2
from .audit import (
    DEFAULT_MEDIUM_CAP,
    DEFAULT_SEARCH_BOX,
    audit_part1,
    audit_part2,
    check_hypothesis_thm1,
    check_hypothesis_thm2,
    form_invariants,
)
from .corpus import FAMILIES, CorpusSpec, InfeasibleSpec, generate_corpus, parse_range
from .enumerate import CSV_HEADER, enumerate_hybrid
from .forms import BinaryForm, FormError, irreducibility_certificate, parse_form
from .logscale import Inconclusive
from .resultants import discriminant
from .roots import RootIsolationError
from .structures import classify_records

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


def _read_form(args) -> BinaryForm:
    if args.form and args.form_file:
        raise UsageError("give either --form or --form-file, not both")
    if args.form:
        return parse_form(args.form)
    if args.form_file:
        text = Path(args.form_file).read_text().strip()
        if text.startswith("{"):
            data = json.loads(text)
            if "form" in data and isinstance(data["form"], str):
                return parse_form(data["form"])
            return BinaryForm.from_json(data.get("form", data))
        return parse_form(text)
    raise UsageError("a form is required (--form or --form-file)")


def _band(args) -> tuple[int, int]:
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise UsageError("--a and --b must be given together")
        if not 1 <= args.a <= args.b:
            raise UsageError("need 1 <= a <= b")
        return args.a, args.b
    if args.h is None or args.h < 1:
        raise UsageError("--h must be a positive integer")
    return 1, args.h


def _emit(payload, out, fmt: str = "json", rows=None) -> None:
    if fmt == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
        out.write(buf.getvalue())
        return
    out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


# -- subcommands ----------------------------------------------------------------


def cmd_invariants(args, out) -> int:
    F = _read_form(args)
    D = discriminant(F)
    M = mahler_measure(F, precision=args.precision) if D.value else None
    data = {"form": str(F), **form_invariants(F, D, M)}
    data["irreducibility"] = type(irreducibility_certificate(F)).__name__.lower()
    if args.h is not None:
        if D.value == 0:
            raise UsageError("the discriminant vanishes; hypotheses are undefined")
        data["hypotheses"] = {
            "thm1": check_hypothesis_thm1(F, args.h, args.kappa_max, D),
            "thm2": check_hypothesis_thm2(F, args.h, D),
        }
    _emit(data, out)
    return EXIT_OK


def _solutions(args, F):
    a, b = _band(args)
    records, cross = enumerate_hybrid(F, a, b, args.box)
    return a, b, records, cross


def cmd_enumerate(args, out) -> int:
    F = _read_form(args)
    a, b, records, cross = _solutions(args, F)
    data = {
        "form": str(F),
        "band": [a, b],
        "box": args.box,
        "crossover": cross.to_json(),
        "count": len(records),
        "solutions": [r.to_json() for r in records],
    }
    _emit(data, out, args.out, [r.csv_row() for r in records])
    return EXIT_OK


def cmd_classify(args, out) -> int:
    F = _read_form(args)
    a, b, records, _ = _solutions(args, F)
    D = discriminant(F)
    th1 = th2 = None
    if args.thm == 1:
        kappa = select_kappa(D, b, F.degree, F.sparsity, args.kappa_max)
        if kappa is None:
            raise UsageError("the Part I height hypothesis does not hold for this form and h")
        th1 = thresholds_part1(F, b, kappa, D=D)
    else:
        th2 = thresholds_part2(F, b, D=D)
    records = classify_records(records, th1, th2, strict=False)
    data = {
        "form": str(F),
        "band": [a, b],
        "thresholds": (th1 or th2).to_json(),
        "solutions": [r.to_json() for r in records],
    }
    _emit(data, out, args.out, [r.csv_row() for r in records])
    return EXIT_OK


def _run_audit(job: tuple) -> tuple[dict, bool]:
    thm, form_json, h, ident, kappa_max, box, timings = job
    F = BinaryForm.from_json(form_json)
    t0 = time.perf_counter()
    if thm == 1:
        rep = audit_part1(F, h, kappa_max=kappa_max, medium_cap=box or DEFAULT_MEDIUM_CAP, form_id=ident)
    else:
        rep = audit_part2(F, h, search_box=box or DEFAULT_SEARCH_BOX, form_id=ident)
    rep.runtime = {"seconds": round(time.perf_counter() - t0, 3)}
    return rep.to_json(include_runtime=timings), rep.passed


def cmd_audit(args, out) -> int:
    if args.thm is None:
        raise UsageError("--thm {1,2} is required")
    jobs = []
    if args.family:
        spec = CorpusSpec(
            args.family,
            parse_range(args.n),
            args.count,
            args.seed,
            _h_values(args),
            target=f"thm{args.thm}",
        )
        for it in generate_corpus(spec):
            jobs.append((args.thm, it.form.to_json(), it.h, it.ident, args.kappa_max, args.box, args.timings))
    else:
        F = _read_form(args)
        if args.h is None or args.h < 1:
            raise UsageError("--h must be a positive integer")
        jobs.append((args.thm, F.to_json(), args.h, args.form_id, args.kappa_max, args.box, args.timings))
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_audit, jobs))
    else:
        results = [_run_audit(j) for j in jobs]
    reports = [r for r, _ in results]
    _emit(reports[0] if len(reports) == 1 and not args.family else reports, out)
    return EXIT_OK if all(ok for _, ok in results) else EXIT_VIOLATION


def _h_values(args) -> tuple[int, ...]:
    if args.h_values:
        return tuple(int(v) for v in args.h_values.split(","))
    return (args.h,) if args.h else (1,)


def cmd_corpus(args, out) -> int:
    if not args.family:
        raise UsageError("--family is required")
    target = None if args.thm is None else f"thm{args.thm}"
    spec = CorpusSpec(args.family, parse_range(args.n), args.count, args.seed, _h_values(args), target=target)
    items = generate_corpus(spec)
    _emit({"spec": {"family": spec.family, "n": list(spec.n_range), "count": spec.count, "seed": spec.seed,
                    "h": list(spec.h_values), "target": target},
           "items": [it.to_json() for it in items]}, out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsethue", description="Solve and audit sparse Thue inequalities |F(x, y)| <= h.")
    sub = p.add_subparsers(dest="command", required=True)

    def form_args(sp):
        sp.add_argument("form_text", nargs="?", help="form such as 'x^3 - 2*y^3'")
        sp.add_argument("--form", help="form as text")
        sp.add_argument("--form-file", help="file holding the form as text or JSON")
        sp.add_argument("--h", type=int, help="right-hand side bound")
        sp.add_argument("--precision", type=int, default=256, help="starting precision in bits")
        sp.add_argument("--kappa-max", type=int, default=None, help="largest kappa tried for the Part I hypothesis")

    sp = sub.add_parser("invariants", help="height, discriminant, Mahler measure and hypotheses")
    form_args(sp)
    for name, helptext in (("enumerate", "primitive solutions in a box"), ("classify", "solutions with their classes")):
        sp = sub.add_parser(name, help=helptext)
        form_args(sp)
        sp.add_argument("--a", type=int, help="lower end of the value band")
        sp.add_argument("--b", type=int, help="upper end of the value band")
        sp.add_argument("--box", type=int, default=DEFAULT_SEARCH_BOX)
        sp.add_argument("--out", choices=("json", "csv"), default="json")
        if name == "classify":
            sp.add_argument("--thm", type=int, choices=(1, 2), default=2)

    sp = sub.add_parser("audit", help="run all checks for a form or a generated corpus")
    form_args(sp)
    sp.add_argument("--thm", type=int, choices=(1, 2))
    sp.add_argument("--box", type=int, default=None, help="search box (Part II) or medium cap (Part I)")
    sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--n", default="5..7", help="degree or range such as 5..7")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--h-values", help="comma separated h values for corpus audits")
    sp.add_argument("--form-id", default="")
    sp.add_argument("--jobs", type=int, default=1, help="parallel audits for corpus runs")
    sp.add_argument("--timings", action="store_true", help="include wall-clock runtime (breaks byte-identical output)")

    sp = sub.add_parser("corpus", help="generate a deterministic list of forms")
    sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--n", default="3..6")
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--h", type=int, default=None)
    sp.add_argument("--h-values", help="comma separated h values")
    sp.add_argument("--thm", type=int, choices=(1, 2), default=None, help="hypothesis the forms must satisfy")
    return p


COMMANDS = {
    "invariants": cmd_invariants,
    "enumerate": cmd_enumerate,
    "classify": cmd_classify,
    "audit": cmd_audit,
    "corpus": cmd_corpus,
}


def run_cli(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "form_text", None):
        if args.form:
            print("error: form given twice", file=sys.stderr)
            return EXIT_USAGE
        args.form = args.form_text
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, FormError, InfeasibleSpec, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Inconclusive, RootIsolationError) as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
