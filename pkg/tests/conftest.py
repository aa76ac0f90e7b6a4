import pytest

from wheelq.quorum import PermissionOracle

ACCEPTANCE_LINES: list[str] = []


class FakeCopies:
    """Permission oracle over logical IDs with no location tracking."""

    def __init__(self, n, down=(), refuse=(), versions=None):
        self.n = n
        self.down = set(down)
        self.refuse = set(refuse)
        self.versions = dict(versions or {})
        self.probes: list[tuple[str, int]] = []

    def oracle(self) -> PermissionOracle:
        def perm(i):
            self.probes.append(("perm", i))
            return i not in self.down and i not in self.refuse

        def acc(i):
            self.probes.append(("acc", i))
            return i not in self.down

        return PermissionOracle(perm, acc, lambda i: self.versions.get(i, 0))


@pytest.fixture
def fake():
    return FakeCopies


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
