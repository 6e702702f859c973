"""Shared pytest plumbing.

Collects the acceptance-test outcomes and prints one PASS/FAIL line per
criterion in the terminal summary (summary sections are not swallowed by
output capture, unlike in-test prints).
"""

import re

_ACCEPT = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")

# nodeid -> [criterion number, title, passed]
_results: dict[str, list] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        match = _ACCEPT.search(item.nodeid)
        if match:
            doc = (item.function.__doc__ or "").strip().splitlines()
            title = doc[0] if doc else item.name
            _results[item.nodeid] = [int(match.group(1)), title, None]


def pytest_runtest_logreport(report):
    if report.nodeid not in _results:
        return
    entry = _results[report.nodeid]
    if report.when == "call":
        entry[2] = report.passed
    elif report.failed:  # setup/teardown error
        entry[2] = False
    elif report.skipped:
        entry[2] = False


def pytest_terminal_summary(terminalreporter):
    ran = [e for e in _results.values() if e[2] is not None]
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(ran):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict} - {title}")
