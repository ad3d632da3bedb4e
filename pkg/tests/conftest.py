from __future__ import annotations

import pathlib

import pytest

from builders import build_calculator, build_pusheen, build_tutorial

FIXTURE_DIR = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def pusheen():
    return build_pusheen()


@pytest.fixture
def calculator():
    return build_calculator()


@pytest.fixture
def tutorial():
    return build_tutorial()


@pytest.fixture(scope="session")
def fixture_paths() -> list[pathlib.Path]:
    paths = sorted(FIXTURE_DIR.glob("*.bshelf.xml"))
    assert len(paths) >= 50, "fixture corpus missing; run tests/gen_fixtures.py"
    return paths
