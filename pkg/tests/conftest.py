import random

import pytest
from hypothesis import strategies as st

from tfpart.gen import enumerate_free
from tfpart.graphcore import Graph

ACCEPTANCE_LINES: list[str] = []


def triangle_free(n_max: int):
    return [g for n in range(1, n_max + 1) for g in enumerate_free(n, 3)]


def all_graphs(n: int):
    return list(enumerate_free(n, n + 1 if n else 2))


def random_graph(n: int, p: float, seed: int) -> Graph:
    rnd = random.Random(seed)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rnd.random() < p])


@st.composite
def graphs(draw, min_n: int = 0, max_n: int = 9):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    pairs = [(u, v) for v in range(n) for u in range(v)]
    return Graph.from_edges(n, [p for p, b in zip(pairs, bits) if b])


@pytest.fixture(scope="session")
def tf8():
    return triangle_free(8)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
