import pytest

# One line per acceptance criterion, printed at the end of the session so the
# pass/fail record survives pytest's output capture.
ACCEPTANCE_LOG: list[str] = []


def record_acceptance(criterion: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {criterion}: {status} - {detail}"
    ACCEPTANCE_LOG.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LOG, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
