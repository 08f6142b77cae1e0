import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from aggclone.fixtures import worked_function, worked_lattice

DATA = Path(__file__).resolve().parent.parent / "data"
_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def worked():
    lat = worked_lattice()
    return lat, worked_function(lat)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture
def acceptance_log(request):
    """Append a one-line verdict; all lines are repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def log(line: str) -> None:
        print(line)
        lines.append(line)

    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
