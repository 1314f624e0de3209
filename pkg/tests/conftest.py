import numpy as np
import pytest

from expinfo import ConvexFamily, DiscreteMeasure
from expinfo.maxent import InstanceFamily


def symbols(n):
    return [f"s{i}" for i in range(n)]


def random_family(rng, max_instances=4, max_symbols=6, max_count=9):
    """Random family of count tables spanning at least two symbols.

    Half of the families have instances of equal total length, which pushes
    the maximum entropy measure off the vertices.
    """
    while True:
        n = int(rng.integers(1, max_instances + 1))
        a = int(rng.integers(2, max_symbols + 1))
        if rng.random() < 0.5:
            V = rng.integers(0, max_count + 1, size=(n, a))
        else:
            length = int(rng.integers(a, 4 * a))
            V = np.vstack([rng.multinomial(length, rng.dirichlet(np.ones(a))) for _ in range(n)])
        if (V.sum(axis=0) > 0).sum() >= 2:
            return InstanceFamily.from_arrays(symbols(a), V)


def random_convex_family(rng, max_vertices=4, max_symbols=6, high=5.0):
    n = int(rng.integers(1, max_vertices + 1))
    a = int(rng.integers(2, max_symbols + 1))
    return ConvexFamily.from_arrays(symbols(a), rng.uniform(0.0, high, size=(n, a)))


def random_measure(rng, alphabet, high=5.0, zero_prob=0.0):
    w = rng.uniform(0.0, high, size=len(alphabet))
    w[rng.random(len(alphabet)) < zero_prob] = 0.0
    return DiscreteMeasure(alphabet, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def symmetric_family():
    return InstanceFamily.from_arrays(["a", "b"], [[2, 0], [0, 2]])
