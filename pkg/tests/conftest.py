import random

import pytest
from hypothesis import settings

from qcluster.seed import Seed
from qcluster.surface import hexagon_seed

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def a2():
    return Seed.build(["x1", "x2"], ["x1", "x2"], {"x1": [0, 1], "x2": [-1, 0]}, {"x1": [0, 1], "x2": [-1, 0]})


@pytest.fixture
def a2c(a2):
    return a2.commutative()


@pytest.fixture
def hexagon():
    return hexagon_seed(quantum=False)


@pytest.fixture
def hexagon_q():
    return hexagon_seed(quantum=True)


@pytest.fixture
def rng():
    return random.Random(20240601)


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a criterion outcome; the summary prints one line per criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _CRITERIA[number] = (bool(ok), detail)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
