import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+?)(?:\[(.*)\])?$")
_results: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    if report.when == "call" or report.outcome == "failed":
        entry = _results.setdefault(int(match[1]), {"name": match[2], "ok": True, "seconds": 0.0})
        entry["ok"] &= report.outcome == "passed"
        entry["seconds"] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"{status} criterion {number:2d} {entry['name']} ({entry['seconds']:.2f}s)")
