from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from stableride.planner import build_matching_graph
from stableride.road import load_road_network
from stableride.workload import ingest_trips

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = resources.files("stableride.data")


@pytest.fixture(scope="session")
def four_network():
    with resources.as_file(DATA / "four_network.csv") as path:
        return load_road_network(path)


@pytest.fixture(scope="session")
def four_trips(four_network):
    with resources.as_file(DATA / "four_trips.csv") as path:
        return ingest_trips(path, network=four_network).trips


@pytest.fixture(scope="session")
def four_graph(four_network, four_trips):
    return build_matching_graph(four_network, four_trips)


def idx(g, *names):
    return tuple(g.index[n] for n in names)
