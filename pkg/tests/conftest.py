import re

_CRITERIA = {
    1: "oracle agreement",
    2: "relabeling round trip",
    3: "convex sweep",
    4: "contraction",
    5: "composition closure",
    6: "intertwining",
    7: "preserver round trip",
    8: "replication norm",
    9: "sum-of-preservers demo",
    10: "shift truncation demo",
    11: "l1 trace gap",
    12: "padding invariance",
}
_outcomes: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(int(m.group(1)), []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in _CRITERIA.items():
        runs = _outcomes.get(n)
        status = "NOT RUN" if runs is None else ("PASS" if all(runs) else "FAIL")
        terminalreporter.write_line(f"ACCEPTANCE {n:2d} {name}: {status}")
