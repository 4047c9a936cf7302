"""Shared pytest plumbing: collects acceptance PASS/FAIL lines.

test_acceptance.py records one line per criterion via record_acceptance;
the terminal summary echoes them so a plain pytest run ends with a
readable scoreboard.
"""

_ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
