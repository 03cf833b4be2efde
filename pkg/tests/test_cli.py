from __future__ import annotations

import io
import json

import pytest

from sparsethue.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, run_cli


def _run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = run_cli(list(argv), out)
    return code, out.getvalue()


def test_invariants():
    code, text = _run("invariants", "x^3 - 2*y^3", "--h", "1")
    data = json.loads(text)
    assert code == EXIT_OK
    assert data["H"] == "2" and data["D"] == "-108" and data["irreducibility"] == "irreducible"
    assert data["hypotheses"]["thm2"] == {"holds": False}
    assert data["M"]["approx"].startswith("2.0") or data["M"]["approx"].startswith("1.99")


def test_enumerate_json_and_csv():
    code, text = _run("enumerate", "--form", "x^3 - 2*y^3", "--h", "1", "--box", "100")
    pts = {(s["x"], s["y"]) for s in json.loads(text)["solutions"]}
    assert code == EXIT_OK and pts == {("1", "0"), ("1", "1")}
    code, text = _run("enumerate", "x^3 - 2*y^3", "--a", "1", "--b", "3", "--box", "10", "--out", "csv")
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,value,class1,class2,route"
    assert "5,4,3,,,box" in lines


def test_classify_part2_labels():
    code, text = _run("classify", "x^3 - 2*y^3", "--h", "3", "--box", "10", "--thm", "2")
    classes = {(s["x"], s["y"]): s["class2"] for s in json.loads(text)["solutions"]}
    assert code == EXIT_OK and classes[("1", "0")] == "small" and classes[("1", "1")] == "small"
    # y = 4 = M^2 exactly cannot be placed by an enclosure of M
    assert classes[("5", "4")] == "undecided"


def test_form_file(tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"form": "x^5 + x^2*y^3 + y^5"}))
    code, text = _run("invariants", "--form-file", str(p))
    assert code == EXIT_OK and json.loads(text)["s"] == 2


def test_audit_single_form_not_applicable():
    code, text = _run("audit", "x^3 - 2*y^3", "--thm", "2", "--h", "1", "--form-id", "demo")
    data = json.loads(text)
    assert code == EXIT_OK and data["form_id"] == "demo" and data["hypotheses"]["thm2_height"] is False


def test_audit_corpus_parallel_matches_serial():
    args = ("audit", "--thm", "2", "--family", "binomial", "--n", "3..4", "--count", "2", "--seed", "1")
    serial, parallel = _run(*args), _run(*args, "--jobs", "2")
    assert serial == parallel and serial[0] == EXIT_OK
    assert len(json.loads(serial[1])) == 2


def test_corpus_output():
    code, text = _run("corpus", "--family", "bennett", "--n", "4", "--count", "3", "--seed", "0")
    data = json.loads(text)
    assert code == EXIT_OK and len(data["items"]) == 3
    assert all(it["form"] for it in data["items"])


@pytest.mark.parametrize(
    "argv",
    [
        ("invariants",),
        ("invariants", "x^3 + z"),
        ("enumerate", "x^3 - 2*y^3"),
        ("enumerate", "x^3 - 2*y^3", "--a", "3", "--b", "1"),
        ("enumerate", "x^3 - 2*y^3", "--form", "x^3 - 3*y^3", "--h", "1"),
        ("audit", "x^3 - 2*y^3", "--h", "1"),
        ("corpus",),
        ("nonsense",),
        ("invariants", "x^2 - 2*x*y + y^2", "--h", "1"),
    ],
)
def test_usage_errors(argv):
    assert _run(*argv)[0] == EXIT_USAGE


def test_exit_code_constants():
    assert (EXIT_OK, EXIT_USAGE, EXIT_VIOLATION) == (0, 1, 2)
