"""Collect the one-line verdicts of the acceptance criteria and print them at the end."""

_verdicts = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "criterion":
            _verdicts.append(value)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_verdicts, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(line)
