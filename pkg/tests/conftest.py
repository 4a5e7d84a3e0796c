import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shape_aligner.synth import generate_scene  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def standard_scene():
    return generate_scene("standard")


@pytest.fixture(scope="session")
def shrunken_scene():
    return generate_scene("shrunken")


@pytest.fixture(scope="session")
def inpainting_scene():
    return generate_scene("inpainting")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda t: int(t.split()[2].rstrip(':'))):
            terminalreporter.write_line(line)
