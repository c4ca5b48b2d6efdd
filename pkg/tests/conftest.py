import numpy as np
import pytest
import scipy.sparse as sp

from nr2rank.graph import Graph, PlantedPartitionSpec, from_edges, generate_planted_partition

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def dense_graph(weights, ids=None) -> Graph:
    w = sp.csr_matrix(np.asarray(weights, dtype=float))
    n = w.shape[0]
    return Graph(w, tuple(ids or (str(i) for i in range(n))))


def random_graph(rng: np.random.Generator, n: int, p: float | None = None, dangling: bool = True) -> Graph:
    """Random directed weighted graph; may contain dangling rows."""
    p = rng.uniform(0.05, 0.6) if p is None else p
    w = rng.random((n, n)) * (rng.random((n, n)) < p)
    if dangling and n > 2 and rng.random() < 0.3:
        w[rng.integers(n)] = 0.0
    return dense_graph(w)


def two_triangles() -> Graph:
    edges = [(str(u), str(v), 1.0) for u, v in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]]
    edges += [(str(v), str(v), 1.0) for v in range(6)]
    return from_edges(edges, node_ids=[str(v) for v in range(6)])


ACCEPTANCE_SPEC = PlantedPartitionSpec(clusters=5, size=20, p_in=0.3, p_out=0.01, seed=7)


@pytest.fixture
def triangles() -> Graph:
    return two_triangles()


@pytest.fixture(scope="session")
def planted() -> Graph:
    return generate_planted_partition(ACCEPTANCE_SPEC)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
