import pytest

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record and assert an acceptance criterion, keeping a PASS/FAIL line
    for the end-of-run summary."""

    def record(k: int, ok: bool, detail: str):
        line = f"ACCEPTANCE {k:>2}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE[k] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
