"""Shared pytest wiring for the acceptance suite.

The acceptance tests register one verdict line per criterion; printing
them from the terminal-summary hook keeps the lines visible in normal
(captured) pytest runs.
"""

ACCEPTANCE_LINES: list[str] = []


def record_verdict(line: str):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
