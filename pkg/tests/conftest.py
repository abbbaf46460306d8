import numpy as np
import pytest
from hypothesis import settings

from mlmod.netcore import MultilayerNetwork, Partition

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_network(rng, N, T, density=0.4, directed=False):
    """Bernoulli layers without self-loops."""
    layers = []
    for _ in range(T):
        a = (rng.random((N, N)) < density).astype(float)
        np.fill_diagonal(a, 0)
        if not directed:
            a = np.triu(a, 1)
            a = a + a.T
        layers.append(a)
    return MultilayerNetwork(layers, directed=directed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_cliques():
    """Two disjoint 4-cliques joined by one edge, single layer."""
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    edges += [(i + 4, j + 4) for i, j in edges] + [(3, 4)]
    return MultilayerNetwork.from_edges([edges], 8)


@pytest.fixture
def fig1_partition():
    g1 = np.arange(1000) // 50
    return Partition.from_layers([g1, g1 // 2])


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
