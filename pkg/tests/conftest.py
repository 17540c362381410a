import pytest

_LINES: list[str] = []


@pytest.fixture(scope="session")
def verdict_line():
    """Record one pass/fail line; all lines are printed in the terminal summary."""

    def record(label: str, ok: bool, detail: str, soft: bool = False) -> bool:
        tag = ("PASS" if ok else "FAIL") + (" (soft)" if soft else "")
        line = f"[{tag}] {label}: {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
