import random

import pytest

from qtreekit.metric import Graph


def random_tree(rng: random.Random, n: int) -> Graph:
    """Random recursive tree on n vertices."""
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    return Graph(n, edges)


@pytest.fixture
def rng():
    return random.Random(0)
