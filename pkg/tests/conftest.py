"""Shared fixtures, including the acceptance-line reporter.

Acceptance tests record one human-readable line each; the terminal summary
prints them as a block at the end of the run so `pytest -v` shows every
criterion with its measured figure next to the pass/fail verdict.
"""

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record `criterion <name>: PASS/FAIL [detail]` for the summary block."""

    def record(name: str, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        _ACCEPTANCE_LINES.append(f"criterion {name}: {status}{suffix}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
