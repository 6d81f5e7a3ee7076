import random

import pytest
from hypothesis import settings, strategies as st

from sepower.exactlin import Subspace, SubspaceUnion, union_normalize

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def matrices(draw, max_rows=5, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [draw(st.lists(small_ints, min_size=c, max_size=c)) for _ in range(r)]


def random_subspace(rng: random.Random, n: int) -> Subspace:
    k = rng.randint(0, n)
    # sparse-ish constraints so intersections are often nontrivial
    rows = [[rng.choice((0, 0, 1, -1, 2)) for _ in range(n)] for _ in range(k)]
    return Subspace.from_constraints(rows, n)


def random_union(rng: random.Random, n: int, max_members: int = 3) -> SubspaceUnion:
    return union_normalize([random_subspace(rng, n) for _ in range(rng.randint(0, max_members))], n)


@st.composite
def unions(draw, n=None):
    seed = draw(st.integers(0, 2**32 - 1))
    dim = n if n is not None else draw(st.integers(1, 5))
    return random_union(random.Random(seed), dim)


@pytest.fixture
def rng():
    return random.Random(12345)
