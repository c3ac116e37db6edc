import pytest

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def record():
    """Store the outcome of one acceptance criterion for the summary table."""

    def _record(number: int, name: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE[number] = (name, bool(passed), detail)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {number:2d}. {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
