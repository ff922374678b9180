import pytest

# criterion number -> list of (ok, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status} | " + "; ".join(d for _, d in parts))


@pytest.fixture
def acceptance():
    return record
