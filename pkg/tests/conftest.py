import numpy as np
import pytest

from jsp_tabu import Solution, builtin_example, evaluate
from jsp_tabu.instance_io import random_instance
from jsp_tabu.schedule import random_selection


def op(label: str):
    """'O31' -> (2, 0): job 3, first operation (textbook 1-indexed labels)."""
    return (int(label[1]) - 1, int(label[2]) - 1)


def fig2_solution() -> Solution:
    return Solution.from_lists(
        [
            [op("O21"), op("O11"), op("O32")],
            [op("O31"), op("O12"), op("O23")],
            [op("O22"), op("O13"), op("O33")],
        ]
    )


@pytest.fixture
def example():
    return builtin_example()


@pytest.fixture
def fig2(example):
    sol = fig2_solution()
    return example, sol, evaluate(example, sol)


def fuzz_cases(count: int, seed: int, max_jobs: int = 10, max_machines: int = 10):
    """Random (instance, feasible selection, evaluated data) triples."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(2, max_jobs + 1))
        m = int(rng.integers(2, max_machines + 1))
        inst = random_instance(n, m, rng, max_duration=int(rng.choice([5, 20, 99])), name=f"fz{i}")
        sol = random_selection(inst, rng)
        yield inst, sol, evaluate(inst, sol)


_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
