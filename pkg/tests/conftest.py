"""Per-criterion pass/fail reporting for the acceptance suite."""

import pytest

_CRITERIA: dict[str, tuple[int, str]] = {}
_RESULTS: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, description): acceptance criterion metadata"
    )


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _CRITERIA[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    meta = _CRITERIA.get(report.nodeid)
    if meta:
        number, desc = meta
        _RESULTS[number] = (desc, report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        desc, ok = _RESULTS[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[criterion {number:2d}] {status}  {desc}")
