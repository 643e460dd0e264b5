import re

from hypothesis import settings

settings.register_profile("ci", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("ci")

_CRITERIA = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = re.search(r"test_c(\d+)", report.nodeid)
    if not match:
        return
    criterion = int(match.group(1))
    _CRITERIA[criterion] = _CRITERIA.get(criterion, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_CRITERIA):
        status = "PASS" if _CRITERIA[criterion] else "FAIL"
        terminalreporter.write_line(f"criterion {criterion}: {status}")
