import pytest

_ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def report():
    """Record one acceptance line; printed again in the terminal summary."""

    def _record(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        _ACCEPTANCE_LINES[number] = line
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(_ACCEPTANCE_LINES[n])
