import numpy as np
import pytest

from markovflow import Network
from markovflow.network import FEATURE, PRIMARY


def random_network(seed, n=30, p=0.15, directed=False, weighted=True):
    rng = np.random.default_rng(seed)
    src, dst = np.nonzero(rng.random((n, n)) < p)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    if not directed:
        keep = src < dst
        src, dst = src[keep], dst[keep]
        # a ring keeps undirected fixtures connected
        ring = np.arange(n)
        src = np.concatenate([src, ring])
        dst = np.concatenate([dst, (ring + 1) % n])
    w = rng.uniform(0.5, 3.0, src.size) if weighted else np.ones(src.size)
    return Network(n, src, dst, w, directed=directed)


def random_bipartite(seed, n_p=8, n_f=6, p=0.4):
    rng = np.random.default_rng(seed)
    b = (rng.random((n_p, n_f)) < p) * rng.integers(1, 4, (n_p, n_f))
    # every node gets at least one link
    b[np.arange(n_p), rng.integers(0, n_f, n_p)] += 1
    b[rng.integers(0, n_p, n_f), np.arange(n_f)] += 1
    return Network.from_biadjacency(b.astype(float))


def two_node():
    return Network(2, [0], [1], [1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(0)


__all__ = ["random_network", "random_bipartite", "two_node", "PRIMARY", "FEATURE"]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
