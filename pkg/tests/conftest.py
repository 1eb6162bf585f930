"""Shared pytest hooks.

The acceptance gate registers one verdict line per criterion; echoing them
from ``pytest_terminal_summary`` keeps them visible in a default ``pytest
-v`` run, where captured stdout of passing tests is suppressed.
"""

_VERDICT_LINES: list[str] = []


def record_verdict(line: str) -> None:
    """Queue a verdict line for the end-of-run summary."""
    _VERDICT_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICT_LINES:
            terminalreporter.write_line(line)
