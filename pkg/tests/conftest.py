import pytest

_acceptance = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _acceptance.get(marker[0])
        if prev is None or prev[1] == "PASS":
            _acceptance[marker[0]] = (marker[1],
                                      "PASS" if report.passed else "FAIL")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        report.acceptance = (m.args[0], m.kwargs.get("title", item.name))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, status = _acceptance[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
