"""Optimality ratios of stable assignments on many small random instances."""

import argparse
import statistics

from stableride.costsharing import ALL_MECHANISMS, build_preferences
from stableride.matcher import CyclicPreferenceError, stable_match
from stableride.optimum import social_optimum
from stableride.planner import build_matching_graph
from stableride.workload import random_geometric_instance


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--instances", type=int, default=1000)
    parser.add_argument("--max-n", type=int, default=20)
    parser.add_argument("--window", type=float, default=180.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    ratios = {m.value: [] for m in ALL_MECHANISMS}
    cyclic = 0
    for k in range(args.instances):
        seed = args.seed + k
        trips, net = random_geometric_instance(2 + k % (args.max_n - 1), seed)
        g = build_matching_graph(net, trips, args.window)
        opt = social_optimum(g)
        for mech in ALL_MECHANISMS:
            try:
                a, _ = stable_match(build_preferences(mech, g), g, mech)
            except CyclicPreferenceError:
                cyclic += 1
                continue
            ratios[mech.value].append(a.social_cost / opt.social_cost)
    print(f"{'mech':>4} {'runs':>5} {'mean':>8} {'max':>8}  bound 1.5")
    for mech, rs in ratios.items():
        print(f"{mech:>4} {len(rs):>5} {statistics.fmean(rs):8.4f} {max(rs):8.4f}")
    print(f"cyclic segment-based runs: {cyclic}")


if __name__ == "__main__":
    main()
