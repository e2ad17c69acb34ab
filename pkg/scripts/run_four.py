"""Payments and stable assignments on the bundled four-commuter example."""

from importlib import resources

from stableride.costsharing import ALL_MECHANISMS, build_preferences, edge_payments
from stableride.matcher import stable_match
from stableride.optimum import social_optimum
from stableride.planner import build_matching_graph
from stableride.road import load_road_network
from stableride.workload import ingest_trips


def main() -> None:
    data = resources.files("stableride.data")
    with resources.as_file(data / "four_network.csv") as net_path, \
            resources.as_file(data / "four_trips.csv") as trips_path:
        net = load_road_network(net_path)
        trips = ingest_trips(trips_path, network=net).trips
    g = build_matching_graph(net, trips)
    opt = social_optimum(g)
    print("standalone:", {cid: g.self_cost(k) for k, cid in enumerate(g.ids)})
    for (i, j), (c, plan) in g.pair_edges.items():
        print(f"pair {g.ids[i]}{g.ids[j]}: cost {c:g}, {plan.topology}")
    print(f"optimum {opt.as_ids(g)['pairs']} cost {opt.social_cost:g}")
    for mech in ALL_MECHANISMS:
        pays = {f"{g.ids[i]}{g.ids[j]}": tuple(round(p, 4) for p in edge_payments(mech, g, i, j))
                for i, j in g.pair_edges}
        a, _ = stable_match(build_preferences(mech, g), g, mech)
        print(f"{mech.value:>3}: payments {pays}; stable {a.as_ids(g)['pairs']} "
              f"cost {a.social_cost:g} ratio {a.social_cost / opt.social_cost:.4f}")


if __name__ == "__main__":
    main()
