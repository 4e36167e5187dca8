import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quasicones.quasicone import random_normal


@pytest.fixture
def rng():
    return random.Random(20240811)


def random_ext_matrix(rng, dim, lo=-5, hi=5, p_inf=0.15, p_neg_inf=0.05):
    from quasicones.tropical import INF, NEG_INF, freeze

    rows = []
    for _ in range(dim):
        row = []
        for _ in range(dim):
            r = rng.random()
            if r < p_inf:
                row.append(INF)
            elif r < p_inf + p_neg_inf:
                row.append(NEG_INF)
            else:
                row.append(rng.randint(lo, hi))
        rows.append(row)
    return freeze(rows)


@pytest.fixture
def random_matrices(rng):
    return lambda count, dim=5, **kw: [
        random_ext_matrix(rng, dim, **kw) for _ in range(count)
    ]


@pytest.fixture
def random_quasicones(rng):
    def make(count, n, bound=None):
        b = bound if bound is not None else n + 2
        return [random_normal(n, b, rng) for _ in range(count)]

    return make
