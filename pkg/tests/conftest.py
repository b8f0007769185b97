import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from carnot_hardy.groups import abelian, heisenberg, htype, quaternionic_triple  # noqa: E402

GROUPS = {
    "R3": abelian(3),
    "H1": heisenberg(1),
    "H2": heisenberg(2),
    "Htype43": htype(quaternionic_triple()),
}

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=list(GROUPS))
def group(request):
    return GROUPS[request.param]


@pytest.fixture
def acceptance_record():
    def record(number: int, title: str, passed: bool, detail: str = ""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
