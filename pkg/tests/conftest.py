import pytest

from oracles import example_table
from qcfix.metric import FiniteMetricSpace, SelfMap


@pytest.fixture
def example_space():
    return FiniteMetricSpace(example_table())


@pytest.fixture
def example_map():
    # T1 = T2 = T3 = 1, T4 = 2, T5 = 3
    return SelfMap([0, 0, 0, 1, 2])


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, (ok, title, detail) in sorted(RESULTS.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
