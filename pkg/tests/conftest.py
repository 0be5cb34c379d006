import pytest

_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Call with (number, ok, detail); prints one PASS/FAIL line and asserts ok."""
    lines = request.config.stash.setdefault(_KEY, [])

    def record(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
