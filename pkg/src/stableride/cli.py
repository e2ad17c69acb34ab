"""Command line: ``stableride {match,optimum,experiment,gen,verify}``.

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from .costsharing import ALL_MECHANISMS, Mechanism, build_preferences, edge_payments
from .errors import InputError, InvariantError
from .experiment import (ExperimentConfig, report_document, run_experiment, run_mechanism,
                         write_distribution_csvs)
from .matcher import detect_cycles, find_blocking_pair, is_cyclic_preference
from .optimum import brute_force_optimum, reduction_gap, social_optimum
from .planner import MatchingGraph, build_matching_graph
from .road import TOL, load_road_network
from .workload import Region, generate_workload, ingest_trips, write_trips

log = logging.getLogger("stableride")

EXAMPLES = {"four": ("four_network.csv", "four_trips.csv")}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors are input errors (exit 1)
        self.print_usage(sys.stderr)
        raise InputError(message)


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--trips", type=Path, help="trip CSV (GPS or junction layout)")
    src.add_argument("--example", choices=sorted(EXAMPLES), help="bundled example instance")
    p.add_argument("--network", type=Path, help="road network CSV for junction-based trips")
    d = ExperimentConfig()
    p.add_argument("--pairing-window", type=float, default=d.pairing_window_s, metavar="S")
    p.add_argument("--fare-base", type=float, default=d.fare_base)
    p.add_argument("--fare-per-km", type=float, default=d.fare_per_km)
    p.add_argument("--mean-speed", type=float, default=d.mean_speed_kmh, metavar="KMH")
    p.add_argument("--detour-factor", type=float, default=d.detour_factor)
    p.add_argument("--slack-minutes", type=float, default=d.slack_minutes)
    p.add_argument("--seed", type=int, default=d.rng_seed, help="recorded in the report")
    p.add_argument("--oracle-limit", type=int, default=d.max_instance_size_for_oracle, metavar="N")
    p.add_argument("--out", type=Path, help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stableride", description="Stable ride-sharing under fair cost sharing.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("match", help="stable assignment under one mechanism")
    _add_instance_args(p)
    p.add_argument("--mechanism", default="eq", help="eq, ega, pp or sb")

    p = sub.add_parser("optimum", help="socially optimal assignment")
    _add_instance_args(p)

    p = sub.add_parser("experiment", help="all mechanisms plus metrics")
    _add_instance_args(p)
    p.add_argument("--mechanisms", default=",".join(m.value for m in ALL_MECHANISMS))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv-dir", type=Path, help="also write per-distribution CSVs")

    p = sub.add_parser("verify", help="stability and oracle checks")
    _add_instance_args(p)
    p.add_argument("--mechanisms", default=",".join(m.value for m in ALL_MECHANISMS))

    p = sub.add_parser("gen", help="synthetic trip workload")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--region", type=Region.parse, default=Region(),
                   help="lon_min,lat_min,lon_max,lat_max")
    p.add_argument("--start", type=float, default=1361620800.0, help="epoch seconds")
    p.add_argument("--out", type=Path, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    mechs = getattr(args, "mechanisms", None)
    return ExperimentConfig(
        mechanisms=tuple(m.strip() for m in mechs.split(",") if m.strip()) if mechs
        else tuple(m.value for m in ALL_MECHANISMS),
        pairing_window_s=args.pairing_window,
        fare_base=args.fare_base,
        fare_per_km=args.fare_per_km,
        mean_speed_kmh=args.mean_speed,
        detour_factor=args.detour_factor,
        slack_minutes=args.slack_minutes,
        rng_seed=args.seed,
        max_instance_size_for_oracle=args.oracle_limit,
        workers=getattr(args, "workers", 1),
    )


def load_instance(args: argparse.Namespace, config: ExperimentConfig):
    if args.example:
        base = resources.files("stableride.data")
        net_name, trips_name = EXAMPLES[args.example]
        with resources.as_file(base / net_name) as net_path, resources.as_file(base / trips_name) as trips_path:
            network = load_road_network(net_path)
            ingested = ingest_trips(trips_path, config.window_policy, network)
    else:
        network = load_road_network(args.network) if args.network else None
        ingested = ingest_trips(args.trips, config.window_policy, network)
    for line, rid, msg in ingested.rejections:
        log.warning("line %d (%s): %s", line, rid or "?", msg)
    if not ingested.trips:
        raise InputError("no valid trips")
    return ingested


def _rejections(ingested) -> list[dict]:
    return [{"line": line, "record_id": rid, "error": msg} for line, rid, msg in ingested.rejections]


def _emit(doc: dict, out: Path | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _graph(args, config) -> tuple[MatchingGraph, object]:
    ingested = load_instance(args, config)
    return build_matching_graph(ingested.network, ingested.trips, config.pairing_window_s), ingested


def cmd_match(args) -> int:
    config = config_from_args(args)
    mech = Mechanism.parse(args.mechanism)
    g, ingested = _graph(args, config)
    out = run_mechanism(g, mech, social_optimum(g))
    ids = g.ids
    doc = {
        "mechanism": mech.value,
        "status": out.status,
        "assignment": out.assignment.as_ids(g),
        "payments": [{"pair": [ids[i], ids[j]], "payments": list(edge_payments(mech, g, i, j))}
                     for i, j in out.assignment.pairs],
        "proposals": out.proposals,
        "rejections": _rejections(ingested),
    }
    if out.status == "cyclic_failure":
        doc["cycles"] = [[ids[k] for k in c] for c in out.cycles]
    _emit(doc, args.out)
    return 0


def cmd_optimum(args) -> int:
    config = config_from_args(args)
    g, ingested = _graph(args, config)
    opt = social_optimum(g)
    _emit({"optimum": opt.as_ids(g), "rejections": _rejections(ingested)}, args.out)
    return 0


def cmd_experiment(args) -> int:
    config = config_from_args(args)
    ingested = load_instance(args, config)
    res = run_experiment(ingested.network, ingested.trips, config)
    doc = report_document(res)
    doc["rejections"] = _rejections(ingested)
    _emit(doc, args.out)
    if args.csv_dir:
        write_distribution_csvs(res, args.csv_dir)
    return 0


def cmd_verify(args) -> int:
    """Re-check every invariant independently; raises InvariantError on failure."""
    config = config_from_args(args)
    g, ingested = _graph(args, config)
    opt = social_optimum(g)
    checks: dict[str, object] = {"reduction_gap": reduction_gap(opt, g)}
    if abs(checks["reduction_gap"]) > 1e-6:
        raise InvariantError("reduction identity violated")
    if len(g) <= config.max_instance_size_for_oracle:
        brute = brute_force_optimum(g, config.max_instance_size_for_oracle)
        checks["oracle_cost"] = brute.social_cost
        if abs(brute.social_cost - opt.social_cost) > TOL:
            raise InvariantError("optimum disagrees with exhaustive search")
    for name in config.mechanisms:
        out = run_mechanism(g, name, opt)
        entry: dict[str, object] = {"status": out.status, "social_cost": out.assignment.social_cost,
                                    "proposals": out.proposals, "budget": out.budget}
        if out.status == "stable":
            if find_blocking_pair(out.assignment, name, g) is not None:
                raise InvariantError(f"{name}: blocking pair in stable output")
        else:
            prefs = build_preferences(name, g)
            if not all(is_cyclic_preference(prefs, c) for c in out.cycles):
                raise InvariantError(f"{name}: reported cycle fails the definition")
            entry["cycles"] = [[g.ids[k] for k in c] for c in out.cycles]
        if name != "sb" and detect_cycles(build_preferences(name, g), limit=1):
            raise InvariantError(f"{name}: cyclic preference")
        checks[name] = entry
    _emit({"ok": True, "checks": checks, "optimum": opt.as_ids(g), "rejections": _rejections(ingested)},
          args.out)
    return 0


def cmd_gen(args) -> int:
    records = generate_workload(args.n, args.region, args.seed, start_time=args.start)
    write_trips(args.out, records)
    log.info("wrote %d trips to %s", len(records), args.out)
    return 0


COMMANDS = {"match": cmd_match, "optimum": cmd_optimum, "experiment": cmd_experiment,
            "verify": cmd_verify, "gen": cmd_gen}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
