import pytest

# criterion id -> one-line verdict, filled by test_acceptance.py
CRITERIA: dict[int, str] = {}


@pytest.fixture
def report():
    def record(num: int, ok: bool, detail: str):
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
        CRITERIA[num] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for num in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[num])
