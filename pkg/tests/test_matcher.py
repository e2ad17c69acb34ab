import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import idx
from stableride.costsharing import PreferenceOrder, build_preferences
from stableride.errors import InvariantError
from stableride.matcher import (Assignment, CyclicPreferenceError, detect_cycles, find_blocking_pair,
                                is_cyclic_preference, proposal_budget, replay_trace, stable_match)
from stableride.planner import build_matching_graph, graph_from_costs
from stableride.workload import random_geometric_instance

# eq and sb settle on (i,j) with k, l alone; ega and pp reach the optimum {(i,k),(j,l)}
EXPECTED = {"eq": ([("i", "j")], 16.3), "ega": ([("i", "k"), ("j", "l")], 14.0),
            "pp": ([("i", "k"), ("j", "l")], 14.0), "sb": ([("i", "j")], 16.3)}


@pytest.mark.parametrize("mech", ["eq", "ega", "pp", "sb"])
def test_four_stable_outcomes(four_graph, mech):
    g = four_graph
    a, trace = stable_match(build_preferences(mech, g), g, mech)
    pairs, cost = EXPECTED[mech]
    assert [tuple(p) for p in a.as_ids(g)["pairs"]] == pairs
    assert a.social_cost == pytest.approx(cost, abs=1e-9)
    assert find_blocking_pair(a, mech, g) is None
    assert replay_trace(trace, len(g)) == list(a.pairs)


def test_blocking_pair_on_all_singletons(four_graph):
    g = four_graph
    alone = Assignment.from_pairs(g, [])
    assert find_blocking_pair(alone, "eq", g) == idx(g, "i", "j")


def test_no_edges_means_no_blocking_pair():
    g = graph_from_costs({"a": 1, "b": 2}, {})
    a, trace = stable_match(build_preferences("eq", g), g, "eq")
    assert a.pairs == () and a.singletons == (0, 1)
    assert len(trace) == 0
    assert find_blocking_pair(a, "eq", g) is None


def test_single_commuter():
    g = graph_from_costs({"solo": 3}, {})
    a, _ = stable_match(build_preferences("pp", g), g, "pp")
    assert a.singletons == (0,) and a.social_cost == 3


def test_assignment_rejects_overlap(four_graph):
    g = four_graph
    i, j, k, _ = idx(g, "i", "j", "k", "l")
    with pytest.raises(InvariantError):
        Assignment.from_pairs(g, [(i, j), (i, k)])
    with pytest.raises(InvariantError):
        Assignment.from_pairs(g, [(j, k)])


def rock_paper_scissors():
    # a: b > c, b: c > a, c: a > b, everyone prefers any partner to riding alone
    g = graph_from_costs({"a": 3, "b": 3, "c": 3}, {("a", "b"): 3, ("a", "c"): 3, ("b", "c"): 3})
    ranked = {0: ((1, 1.0), (2, 2.0)), 1: ((2, 1.0), (0, 2.0)), 2: ((0, 1.0), (1, 2.0))}
    prefs = {k: PreferenceOrder(k, 3.0, opts) for k, opts in ranked.items()}
    return g, prefs


def test_detect_cycles_rock_paper_scissors():
    _, prefs = rock_paper_scissors()
    # derived by enumeration: only (a, c, b) meets the definition
    assert detect_cycles(prefs) == [(0, 2, 1)]
    assert is_cyclic_preference(prefs, (0, 2, 1))
    assert not is_cyclic_preference(prefs, (0, 1, 2))


def test_cyclic_failure_reported():
    g, prefs = rock_paper_scissors()
    with pytest.raises(CyclicPreferenceError) as err:
        stable_match(prefs, g)
    assert err.value.cycles == [(0, 2, 1)]
    assert err.value.blocking is not None
    assert len(err.value.trace) <= proposal_budget(prefs)


def test_detect_cycles_empty():
    assert detect_cycles({}) == []
    assert detect_cycles({0: PreferenceOrder(0, 1.0, ())}) == []


def test_detect_cycles_subset():
    _, prefs = rock_paper_scissors()
    assert detect_cycles(prefs, commuters=[0, 1]) == []
    assert detect_cycles(prefs, max_length=3) == [(0, 2, 1)]


@pytest.mark.parametrize("mech", ["eq", "ega", "pp"])
def test_four_acyclic(four_graph, mech):
    assert detect_cycles(build_preferences(mech, four_graph)) == []


@given(st.integers(2, 14), st.integers(0, 10_000), st.sampled_from(["eq", "ega", "pp"]))
def test_acyclic_mechanisms_always_stable(n, seed, mech):
    trips, net = random_geometric_instance(n, seed)
    g = build_matching_graph(net, trips, 180)
    prefs = build_preferences(mech, g)
    assert detect_cycles(prefs) == []
    a, trace = stable_match(prefs, g, mech)
    assert find_blocking_pair(a, mech, g) is None
    assert len(trace) <= proposal_budget(prefs)
    assert replay_trace(trace, len(g)) == list(a.pairs)
    assert a.commuters() == set(range(len(g)))


@given(st.integers(2, 14), st.integers(0, 10_000))
def test_segment_based_stable_or_confirmed_cycle(n, seed):
    trips, net = random_geometric_instance(n, seed)
    g = build_matching_graph(net, trips, 180)
    prefs = build_preferences("sb", g)
    try:
        a, _ = stable_match(prefs, g, "sb")
    except CyclicPreferenceError as exc:
        assert exc.cycles
        assert all(is_cyclic_preference(prefs, c) for c in exc.cycles)
        assert set(exc.cycles) <= set(detect_cycles(prefs))
    else:
        assert find_blocking_pair(a, "sb", g) is None


def test_deterministic(four_graph):
    prefs = build_preferences("ega", four_graph)
    first = stable_match(prefs, four_graph, "ega")
    second = stable_match(prefs, four_graph, "ega")
    assert first[0] == second[0]
    assert first[1].rounds == second[1].rounds
