"""Shared fixtures and the acceptance summary printed at the end of the session."""

import numpy as np
import pytest

from acceptance_log import RESULTS
from dp_bilevel.dcopf import instance
from dp_bilevel.fixtures import onebus_2gen, tri_3bus


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        passed, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def onebus_inst():
    """One-bus fixture with f_tilde = 0.5 and beta = 0.01."""
    return instance(onebus_2gen(), 0.5, 0.01)


@pytest.fixture
def tri_net():
    return tri_3bus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
