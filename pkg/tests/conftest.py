import math
import time

import numpy as np
import pytest

from cp_synth.solver import NbProblem, SolverOptions, load_reference_table, solve_nb


@pytest.fixture(scope="session")
def table():
    return load_reference_table()


@pytest.fixture(scope="session")
def numeric_solves(table):
    """Every N in {6, 8} table entry solved once with the default budget.

    Maps ``(N, p)`` to ``(solutions, seconds)``.
    """
    out = {}
    for (n, p) in sorted(table):
        if n < 6:
            continue
        t0 = time.perf_counter()
        sols = solve_nb(NbProblem(n, p), SolverOptions())
        out[(n, p)] = (sols, time.perf_counter() - t0)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def table_radians(table, n, p):
    return [math.pi * f for f in table[(n, p)]]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
