import pytest

ACCEPTANCE_LOG: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    """Record a pass/fail line for the acceptance summary, then assert."""

    def record(name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LOG.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LOG:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
