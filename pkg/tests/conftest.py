import pytest

from mcfeon.topology import load_topology

TWO_NODE_DOC = {
    "nodes": 2,
    "cores": 3,
    "core_adjacency": 2,
    "links": [{"a": 0, "b": 1, "length_km": 100}],
}

# A-B direct (3 km) plus the two-hop detour A-C-B (2 km): two routes per pair.
TRIANGLE_DOC = {
    "nodes": 3,
    "cores": 3,
    "core_adjacency": 2,
    "links": [
        {"a": 0, "b": 2, "length_km": 1},
        {"a": 2, "b": 1, "length_km": 1},
        {"a": 0, "b": 1, "length_km": 3},
    ],
}


@pytest.fixture(scope="session")
def nsfnet():
    return load_topology("nsfnet")


@pytest.fixture(scope="session")
def cost239():
    return load_topology("cost239")


@pytest.fixture()
def two_node():
    return load_topology(TWO_NODE_DOC, k_routes=5)


@pytest.fixture()
def triangle():
    return load_topology(TRIANGLE_DOC, k_routes=2)
