from __future__ import annotations

import pytest

from exact_t.library import Library
from exact_t.solver import SolverConfig


@pytest.fixture(scope="session")
def lib():
    return Library(7, SolverConfig(max_wires=7))


@pytest.fixture(scope="session")
def lib_dc():
    return Library(7, SolverConfig(max_wires=7, use_dont_cares=True))
