from fractions import Fraction

import pytest

from corrcache.library import build_grouped_library
from corrcache.worked import example_compressed, example_library, walkthrough_caches, rapcm_caches


@pytest.fixture
def ex_lib():
    return example_library()


@pytest.fixture
def ex_clib():
    return example_compressed()


@pytest.fixture
def walk():
    return walkthrough_caches()


@pytest.fixture
def rap_fixture():
    return rapcm_caches()


@pytest.fixture
def hundred_lib():
    return build_grouped_library(100, 2, Fraction(1, 5), 200)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
