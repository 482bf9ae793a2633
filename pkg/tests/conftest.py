import re
from collections import defaultdict

_ACCEPT_RE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_results: dict[str, list] = defaultdict(list)


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = _ACCEPT_RE.search(report.nodeid)
    if m:
        _results[m.group(1)].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results, key=int):
        outcomes = _results[num]
        verdict = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict} ({len(outcomes)} check(s))")
