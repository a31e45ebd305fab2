import re

import pytest

_OUTCOMES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    match = re.match(r"test_criterion_(\d+)_", item.name)
    if not match:
        return
    number = int(match.group(1))
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _OUTCOMES[number] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    import test_acceptance as suite

    terminalreporter.section("acceptance criteria")
    for number, title in suite.CRITERIA.items():
        status = _OUTCOMES.get(number, "NOT RUN")
        detail = suite.MEASURED.get(number, "")
        terminalreporter.write_line(f"{status} criterion {number:2d}: {title}" + (f" | {detail}" if detail else ""))
