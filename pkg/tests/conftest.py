import pytest

_CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.fixture
def report_criterion(request):
    """Record one pass/fail line per acceptance criterion; printed in the summary."""
    lines = request.config.stash[_CRITERIA]

    def report(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} | {detail}"
        lines.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
