import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import idx
from stableride.errors import InputError, InvariantError
from stableride.planner import (TripRequest, build_matching_graph, check_plan_feasible, graph_from_costs,
                                min_cost_sharable_ride, plan_pair_rides, plan_standalone)
from stableride.road import FareModel, GeometricNetwork, RoadNetwork
from stableride.workload import random_geometric_instance


def test_four_costs(four_graph):
    g = four_graph
    assert g.ids == ["i", "j", "k", "l"]
    assert [g.self_cost(k) for k in range(4)] == [4.0, 4.0, 4.9, 4.9]
    costs = {(g.ids[a], g.ids[b]): c for (a, b), (c, _) in g.pair_edges.items()}
    assert costs == {("i", "j"): 6.5, ("i", "k"): 7.0, ("j", "l"): 7.0}


def test_four_topologies(four_graph):
    g = four_graph
    assert g.edge(*idx(g, "i", "j"))[1].topology == "combined(i;j)"
    assert g.edge(*idx(g, "i", "k"))[1].topology == "hitchhiking(i;k)"
    assert g.edge(*idx(g, "j", "l"))[1].topology == "hitchhiking(j;l)"


def test_four_plans_pass_audit(four_graph, four_trips):
    for _, plan in four_graph.pair_edges.values():
        assert check_plan_feasible(plan, four_trips) == []
    for _, plan in four_graph.self_costs:
        assert check_plan_feasible(plan, four_trips) == []


def line_network() -> RoadNetwork:
    # a -> b -> c -> d, one unit each, 60 s per unit
    net = RoadNetwork()
    for j in "abcd":
        net.add_junction(j)
    for u, v in ("ab", "bc", "cd"):
        net.add_segment(u, v, 1.0, 60.0)
    return net


def test_hitchhiking_nested_trip():
    net = line_network()
    outer = TripRequest("o", "a", "d", 0, 10_000)
    inner = TripRequest("n", "b", "c", 0, 10_000)
    plan = min_cost_sharable_ride(net, inner, outer)
    assert plan.topology == "hitchhiking(n;o)"
    assert plan.total_cost == 3.0
    assert plan.rider_distances == {"o": 3.0, "n": 1.0}


def test_topology_tie_break_prefers_first_order():
    # identical trips: every order costs the same, first (hitchhiking a;b) wins
    net = line_network()
    a = TripRequest("a", "a", "c", 0, 10_000)
    b = TripRequest("b", "a", "c", 0, 10_000)
    plans = plan_pair_rides(net, a, b)
    assert len(plans) == 4
    best = min_cost_sharable_ride(net, a, b)
    assert best.topology == "hitchhiking(a;b)"
    assert best.total_cost == 2.0
    # zero-length legs keep a strict stop order
    assert check_plan_feasible(best, [a, b]) == []
    assert best.segment_costs[0] == 0.0


def test_deadline_makes_pair_infeasible():
    net = line_network()
    outer = TripRequest("o", "a", "d", 0, 10_000)
    inner = TripRequest("n", "b", "c", 0, 10_000)
    # o must arrive by 180 s: the shared route takes 180 s, so it still fits
    tight = TripRequest("o", "a", "d", 0, 180.0)
    assert min_cost_sharable_ride(net, inner, tight) is not None
    late = TripRequest("n", "b", "c", 500.0, 10_000)
    tight2 = TripRequest("o", "a", "d", 0, 400.0)
    assert min_cost_sharable_ride(net, late, tight2) is None
    assert min_cost_sharable_ride(net, late, outer) is not None


def test_waiting_at_pickup():
    net = line_network()
    trip = TripRequest("x", "a", "b", 100.0, 1000.0)
    plan = plan_standalone(net, trip)
    assert [w.arrival for w in plan.stops] == [100.0, 160.0]


def test_unroutable_trip_rejected_from_graph():
    net = line_network()
    trips = [TripRequest("back", "d", "a", 0, 100), TripRequest("fwd", "a", "d", 0, 1000)]
    g = build_matching_graph(net, trips)
    assert g.ids == ["fwd"]
    assert [cid for cid, _ in g.rejected] == ["back"]


def test_duplicate_ids_rejected():
    net = line_network()
    trips = [TripRequest("x", "a", "b", 0, 1000), TripRequest("x", "b", "c", 0, 1000)]
    with pytest.raises(InputError):
        build_matching_graph(net, trips)


def test_trip_validation():
    with pytest.raises(InputError):
        TripRequest("x", "a", "a", 0, 10)
    with pytest.raises(InputError):
        TripRequest("x", "a", "b", 10, 10)


def test_pairing_window_limits_edges():
    net = line_network()
    trips = [TripRequest("p", "a", "c", 0, 10_000), TripRequest("q", "a", "c", 200, 10_000)]
    assert len(build_matching_graph(net, trips, 180).pair_edges) == 0
    assert len(build_matching_graph(net, trips, 200).pair_edges) == 1


def test_graph_from_costs():
    g = graph_from_costs({"a": 4, "b": 4}, {("b", "a"): 6.5})
    assert g.ids == ["a", "b"]
    assert g.edge(0, 1)[0] == 6.5
    with pytest.raises(InvariantError):
        graph_from_costs({"a": 4, "b": 5}, {("a", "b"): 4.5})


@given(st.integers(2, 9), st.integers(0, 10_000))
def test_random_plans_are_feasible(n, seed):
    trips, net = random_geometric_instance(n, seed)
    g = build_matching_graph(net, trips, 180)
    by_id = {t.commuter_id: t for t in trips}
    for (i, j), (c, plan) in g.pair_edges.items():
        assert check_plan_feasible(plan, [by_id[r] for r in plan.riders]) == []
        # the shared route contains each rider's own trip
        assert c >= max(g.self_cost(i), g.self_cost(j)) - 1e-9
        assert c == pytest.approx(math.fsum(plan.segment_costs))
        # no cheaper feasible order exists
        assert c <= min(p.total_cost for p in plan_pair_rides(net, g.commuters[i], g.commuters[j])) + 1e-9


def test_geometric_coincident_pickups():
    net = GeometricNetwork(FareModel())
    s = net.add_point(-73.98, 40.75)
    d1 = net.add_point(-73.97, 40.76)
    d2 = net.add_point(-73.96, 40.77)
    a = TripRequest("a", s, d1, 0, 5000)
    b = TripRequest("b", s, d2, 0, 5000)
    plan = min_cost_sharable_ride(net, a, b)
    assert plan is not None
    assert check_plan_feasible(plan, [a, b]) == []
    assert plan.total_cost == pytest.approx(net.leg(s, d1).cost + net.leg(d1, d2).cost)
