import pytest

ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (number, description, seconds)."""

    def record(number: int, text: str, seconds: float) -> None:
        ACCEPTANCE[number] = (text, request.node.nodeid, seconds)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when == "call" or status != "passed":
                outcomes[rep.nodeid] = status
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        text, nodeid, seconds = ACCEPTANCE[number]
        status = "PASS" if outcomes.get(nodeid) == "passed" else "FAIL"
        terminalreporter.write_line(f"{status} [{number}] {text} ({seconds:.2f} s)")
