import pytest

from tests.graphs import (
    BRIDGE,
    TRIANGLE_EDGES,
    make_graph,
    random_connected_graph,
    unit_laplacian,
    weighted_laplacian,
)


@pytest.fixture
def single_edge():
    return unit_laplacian(2, [(0, 1)])


@pytest.fixture
def triangle():
    return unit_laplacian(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def two_triangles():
    """Two unit-weight triangles joined by a weak 0.01 bridge"""
    edges = TRIANGLE_EDGES + [BRIDGE]
    return weighted_laplacian(6, edges, [1.0] * len(TRIANGLE_EDGES) + [0.01])


@pytest.fixture
def two_triangles_graph():
    """Same shape as two_triangles, with attributes that separate the halves"""
    attributes = [[0.0], [0.1], [0.2], [5.0], [5.1], [5.2]]
    return make_graph(6, TRIANGLE_EDGES + [BRIDGE], attributes=attributes)


@pytest.fixture
def random_graph():
    return random_connected_graph(50, 0.1, rng_seed=7, attribute_dim=2)
