from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from turingstripes.coefficients import compute_coefficients
from turingstripes.model import designed_example, linear_coeffs

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

EPS = 0.4
Q_PRINTED = -0.215     # published effective quadratic coefficient at eps = 0.4


@pytest.fixture(scope="session")
def designed():
    return designed_example(EPS)


@pytest.fixture(scope="session")
def turing(designed):
    return linear_coeffs(designed)


@pytest.fixture(scope="session")
def coeffs(designed, turing):
    return compute_coefficients(designed, turing)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
