from __future__ import annotations

import pytest

CRITERIA: dict[int, str] = {
    1: "exact invariants",
    2: "Mahler measure bounds",
    3: "hybrid enumeration equals box enumeration",
    4: "Bennett family oracle",
    5: "Siegel family oracle",
    6: "Part II audit on small-height forms",
    7: "Part I audit on large-discriminant binomials",
    8: "psi and Phi unit properties",
    9: "candidate root sets",
    10: "deterministic reports",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        k = getattr(report, "criterion", None)
        if k is not None:
            _outcomes.setdefault(k, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        if k not in _outcomes:
            continue
        status = "PASS" if all(_outcomes[k]) else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d} [{CRITERIA[k]}]: {status}")
