import random

import pytest

from orderdual import lattice as lat
from orderdual import poset as ps


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def small_lattices():
    """Chains, grids, the subset cube, and the two nondistributive
    pentagon/diamond fixtures."""
    out = {
        "chain2": ps.chain(2),
        "chain3": ps.chain(3),
        "chain4": ps.chain(4),
        "chain5": ps.chain(5),
        "grid22": ps.product_poset([ps.chain(2), ps.chain(2)]),
        "grid23": ps.product_poset([ps.chain(2), ps.chain(3)]),
        "grid33": ps.product_poset([ps.chain(3), ps.chain(3)]),
        "cube3": ps.product_poset([ps.chain(2)] * 3),
        "m3": lat.m3(),
        "n5": lat.n5(),
    }
    return out


def random_posets(rng, count, n_max=6):
    out = []
    for _ in range(count):
        n = rng.randint(1, n_max)
        out.append(ps.random_poset(rng, n))
    return out
