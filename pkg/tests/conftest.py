import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Collect one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def _record(criterion: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
