import functools

import pytest

from orthopack.coxeter import build_cell


@functools.lru_cache(maxsize=None)
def cached_cell(q, r, placement_t=0.0):
    return build_cell((q, r), placement_t=placement_t)


@pytest.fixture
def cell33():
    return cached_cell(3, 3)


@pytest.fixture
def cell44():
    return cached_cell(4, 4, -0.5)


@pytest.fixture
def cell36():
    return cached_cell(3, 6, -0.5)


@pytest.fixture
def cell63():
    return cached_cell(6, 3, -0.1)
