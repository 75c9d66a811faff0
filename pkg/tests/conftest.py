import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from setsynth.lang import parse_program

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def load(name: str):
    return parse_program((PROGRAMS / name).read_text())


@pytest.fixture
def programs_dir() -> Path:
    return PROGRAMS
