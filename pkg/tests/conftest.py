import itertools

import numpy as np
import pytest

from assortmax import AssortmentCollection, Instance


@pytest.fixture
def e1() -> Instance:
    """Three-item instance used throughout: p=(10,8,5), v=(.2,.4,.5), v0=1."""
    return Instance([10.0, 8.0, 5.0], [0.2, 0.4, 0.5], 1.0)


@pytest.fixture
def e1_triplet() -> AssortmentCollection:
    return AssortmentCollection([{1}, {1, 2}, {2, 3}], n=3)


def all_subsets(n: int) -> AssortmentCollection:
    """Every non-empty subset of 1..n, in binary counting order."""
    sets = [set(s) for k in range(1, n + 1)
            for s in itertools.combinations(range(1, n + 1), k)]
    return AssortmentCollection(sets, n=n)


@pytest.fixture
def e1_all(e1) -> AssortmentCollection:
    return all_subsets(3)


def random_instance(rng: np.random.Generator, n: int, price_hi: float = 10.0):
    prices = np.sort(rng.uniform(0.0, price_hi, n))[::-1].copy()
    weights = rng.uniform(0.0, 1.0, n)
    v0 = float(rng.uniform(0.2, 1.0))
    return Instance(prices, weights, v0)
