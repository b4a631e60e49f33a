import pytest

# filled by test_acceptance.py: criterion number -> (passed, detail)
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        passed, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} [{num}] {title}: {detail}")


@pytest.fixture
def record():
    def _record(num, title, passed, detail):
        ACCEPTANCE[num] = (bool(passed), title, detail)
        return passed

    return _record
