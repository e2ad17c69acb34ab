import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import idx
from stableride.costsharing import (ALL_MECHANISMS, Mechanism, build_preferences, edge_payments,
                                    negative_utility_flags, payments)
from stableride.errors import InputError
from stableride.planner import build_matching_graph, graph_from_costs
from stableride.workload import random_geometric_instance

# frozen by hand from the fixture costs c_i=c_j=4, c_k=c_l=4.9, c_ij=6.5, c_ik=c_jl=7
FOUR_PAYMENTS = {
    "eq": {("i", "j"): (3.25, 3.25), ("i", "k"): (3.5, 3.5)},
    "ega": {("i", "j"): (3.25, 3.25), ("i", "k"): (3.05, 3.95)},
    "pp": {("i", "j"): (3.25, 3.25), ("i", "k"): (28 / 8.9, 34.3 / 8.9)},
    "sb": {("i", "j"): (3.25, 3.25), ("i", "k"): (2.0, 5.0)},
}


@pytest.mark.parametrize("mech", ["eq", "ega", "pp", "sb"])
def test_four_payments(four_graph, mech):
    for (a, b), expected in FOUR_PAYMENTS[mech].items():
        got = edge_payments(mech, four_graph, *idx(four_graph, a, b))
        assert got == pytest.approx(expected, abs=1e-9)


def test_payment_profile(four_graph):
    g = four_graph
    i, k = idx(g, "i", "k")
    plan = g.edge(i, k)[1]
    prof = payments("ega", plan, 4.0, 4.9)
    assert prof.utility_i == pytest.approx(0.95)
    assert prof.utility_j == pytest.approx(0.95)
    assert prof.payment_of("k") == pytest.approx(3.95)


def test_four_preferences(four_graph):
    g = four_graph
    i, j, k, l = idx(g, "i", "j", "k", "l")
    eq = build_preferences("eq", g)
    assert eq[i].partners == (j, k)
    assert eq[k].partners == (i,)
    sb = build_preferences("sb", g)
    assert sb[i].partners == (k, j)
    # k would pay 5 > 4.9 under segment-based sharing
    assert sb[k].partners == ()


def test_tie_with_standalone_kept_apart():
    g = graph_from_costs({"a": 4, "b": 4, "c": 4}, {("a", "b"): 8, ("a", "c"): 6})
    prefs = build_preferences("eq", g)
    assert prefs[0].partners == (2,)
    assert prefs[0].tied_with_standalone == ((1, 4.0),)
    assert prefs[1].partners == ()


def test_ties_broken_by_partner_id():
    g = graph_from_costs({"a": 4, "b": 4, "c": 4, "d": 4}, {("a", "d"): 6, ("a", "b"): 6, ("a", "c"): 6})
    assert build_preferences("eq", g)[0].partners == (1, 2, 3)


def test_negative_utility_flags():
    # c = 9 > c_a + c_b: every budget-balanced split hurts someone
    g = graph_from_costs({"a": 4, "b": 4.5}, {("a", "b"): 9})
    assert negative_utility_flags("ega", g) == [(("a", "b"), "a"), (("a", "b"), "b")]
    assert ("a", "b") in {pair for pair, _ in negative_utility_flags("eq", g)}
    ok = graph_from_costs({"a": 4, "b": 4.5}, {("a", "b"): 6})
    assert negative_utility_flags("ega", ok) == []
    assert negative_utility_flags("pp", ok) == []


def test_mechanism_parse():
    assert Mechanism.parse("egalitarian") is Mechanism.EGALITARIAN
    assert Mechanism.parse("segment-based") is Mechanism.SEGMENT_BASED
    assert Mechanism.parse("pp") is Mechanism.PROPORTIONAL
    with pytest.raises(InputError):
        Mechanism.parse("shapley")


@given(st.integers(2, 8), st.integers(0, 10_000))
def test_budget_balance_and_shapes(n, seed):
    trips, net = random_geometric_instance(n, seed)
    g = build_matching_graph(net, trips, 180)
    for (i, j), (c, plan) in g.pair_edges.items():
        c_i, c_j = g.self_cost(i), g.self_cost(j)
        for mech in ALL_MECHANISMS:
            p_i, p_j = edge_payments(mech, g, i, j)
            assert p_i + p_j == pytest.approx(c, abs=1e-9)
        e_i, e_j = edge_payments("ega", g, i, j)
        assert c_i - e_i == pytest.approx(c_j - e_j, abs=1e-9)
        q_i, q_j = edge_payments("pp", g, i, j)
        assert q_i * c_j == pytest.approx(q_j * c_i, rel=1e-9)


@given(st.integers(2, 8), st.integers(0, 10_000), st.sampled_from(["eq", "ega", "pp", "sb"]))
def test_preferences_sorted_and_truncated(n, seed, mech):
    trips, net = random_geometric_instance(n, seed)
    g = build_matching_graph(net, trips, 180)
    for k, pref in build_preferences(mech, g).items():
        pays = [p for _, p in pref.ranked_options]
        assert pays == sorted(pays)
        assert all(p < g.self_cost(k) - 1e-9 for p in pays)
        for (a, pa), (b, pb) in zip(pref.ranked_options, pref.ranked_options[1:]):
            assert pa < pb or a < b
