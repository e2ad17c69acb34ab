"""Run every mechanism on one trip set and assemble a deterministic report."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .costsharing import ALL_MECHANISMS, Mechanism, build_preferences, negative_utility_flags
from .errors import InputError, InvariantError
from .matcher import (Assignment, CyclicPreferenceError, detect_cycles, find_blocking_pair,
                      proposal_budget, stable_match)
from .metrics import commuter_distributions
from .optimum import brute_force_optimum, check_optimal_not_above, reduction_gap, social_optimum
from .planner import LegProvider, MatchingGraph, TripRequest, build_matching_graph
from .road import TOL, FareModel
from .workload import TimeWindowPolicy

RATIO_NOTE = ("Ratios observed on real city taxi data are typically at or below 1.2; "
              "this is indicative only. The hard guarantee checked here is 1.5.")


@dataclass
class ExperimentConfig:
    mechanisms: tuple[str, ...] = tuple(m.value for m in ALL_MECHANISMS)
    pairing_window_s: float = 180.0
    fare_base: float = 0.0
    fare_per_km: float = 1.55
    mean_speed_kmh: float = 20.0
    detour_factor: float = 1.5
    slack_minutes: float = 10.0
    rng_seed: int = 0
    max_instance_size_for_oracle: int = 12
    workers: int = 1

    def __post_init__(self) -> None:
        self.mechanisms = tuple(Mechanism.parse(m).value for m in self.mechanisms)
        if not self.mechanisms:
            raise InputError("at least one mechanism is required")
        if len(set(self.mechanisms)) != len(self.mechanisms):
            raise InputError("duplicate mechanism")
        if not self.pairing_window_s >= 0:
            raise InputError("pairing_window_s must be >= 0")
        if self.fare_base < 0 or self.fare_per_km < 0:
            raise InputError("fares must be >= 0")
        if not self.mean_speed_kmh > 0:
            raise InputError("mean_speed_kmh must be > 0")
        if self.detour_factor < 1 or self.slack_minutes < 0:
            raise InputError("detour_factor must be >= 1 and slack_minutes >= 0")
        if self.workers < 1:
            raise InputError("workers must be >= 1")

    @property
    def fare(self) -> FareModel:
        return FareModel(self.fare_base, self.fare_per_km, self.mean_speed_kmh)

    @property
    def window_policy(self) -> TimeWindowPolicy:
        return TimeWindowPolicy(self.fare, self.detour_factor, self.slack_minutes)

    def echo(self) -> dict:
        out = asdict(self)
        out["mechanisms"] = list(self.mechanisms)
        out.pop("workers")
        return out


@dataclass
class MechanismOutcome:
    mechanism: str
    status: str  # "stable" or "cyclic_failure"
    assignment: Assignment
    proposals: int
    budget: int
    report: dict
    negative_utility_pairs: int
    cycles: list[tuple[int, ...]] = field(default_factory=list)
    blocking: tuple[int, int] | None = None


@dataclass
class ExperimentResult:
    graph: MatchingGraph
    optimum: Assignment
    outcomes: dict[str, MechanismOutcome]
    config: ExperimentConfig
    oracle_checked: bool = False

    def to_json(self) -> str:
        return json.dumps(report_document(self), sort_keys=True, indent=1, allow_nan=False)


def run_mechanism(g: MatchingGraph, mech: Mechanism | str, optimum: Assignment) -> MechanismOutcome:
    """Preferences, proposals, stability verification and metrics for one mechanism."""
    mech = Mechanism.parse(mech)
    prefs = build_preferences(mech, g)
    budget = proposal_budget(prefs)
    flags = len(negative_utility_flags(mech, g))
    try:
        assignment, trace = stable_match(prefs, g, mech)
    except CyclicPreferenceError as exc:
        if mech is not Mechanism.SEGMENT_BASED:
            raise InvariantError(f"cyclic preference under {mech.value}: {exc.cycles[0]}") from exc
        report = commuter_distributions(exc.assignment, mech, g, optimum).to_dict()
        return MechanismOutcome(mech.value, "cyclic_failure", exc.assignment, len(exc.trace), budget,
                                report, flags, exc.cycles, exc.blocking)
    if len(trace) > budget:
        raise InvariantError("proposal count above budget")
    if find_blocking_pair(assignment, mech, g) is not None:
        raise InvariantError("stable_match returned an unstable assignment")
    if mech is not Mechanism.SEGMENT_BASED and detect_cycles(prefs, limit=1):
        raise InvariantError(f"cyclic preference under {mech.value}")
    check_optimal_not_above(assignment, optimum)
    report = commuter_distributions(assignment, mech, g, optimum).to_dict()
    return MechanismOutcome(mech.value, "stable", assignment, len(trace), budget, report, flags)


def run_on_graph(g: MatchingGraph, config: ExperimentConfig | None = None) -> ExperimentResult:
    config = config or ExperimentConfig()
    if len(g) == 0:
        raise InputError("no routable trips")
    optimum = social_optimum(g)
    if abs(reduction_gap(optimum, g)) > 1e-6:
        raise InvariantError("reduction identity violated by the optimum")
    checked = False
    if len(g) <= config.max_instance_size_for_oracle:
        oracle = brute_force_optimum(g, config.max_instance_size_for_oracle)
        if abs(oracle.social_cost - optimum.social_cost) > TOL:
            raise InvariantError("optimum disagrees with exhaustive search")
        checked = True
    if config.workers > 1:
        # the graph is read-only from here on; results are collected in config order
        with ThreadPoolExecutor(config.workers) as pool:
            done = list(pool.map(lambda m: run_mechanism(g, m, optimum), config.mechanisms))
    else:
        done = [run_mechanism(g, m, optimum) for m in config.mechanisms]
    return ExperimentResult(g, optimum, {o.mechanism: o for o in done}, config, checked)


def run_experiment(net: LegProvider, trips: Sequence[TripRequest],
                   config: ExperimentConfig | None = None) -> ExperimentResult:
    """Build the matching graph once and evaluate every configured mechanism."""
    config = config or ExperimentConfig()
    if not trips:
        raise InputError("no trips to match")
    g = build_matching_graph(net, trips, config.pairing_window_s)
    return run_on_graph(g, config)


def _summary(values: list[float]) -> dict:
    if not values:
        return {"count": 0}
    ordered = sorted(values)

    def q(p: float) -> float:
        return ordered[min(len(ordered) - 1, int(p * len(ordered)))]

    return {"count": len(ordered), "mean": math.fsum(ordered) / len(ordered), "min": ordered[0],
            "p50": q(0.5), "p90": q(0.9), "max": ordered[-1]}


DISTRIBUTIONS = ("normalized_utilities", "standalone_cost_ratios", "delay_ratios", "separation_distances_km")


def report_document(res: ExperimentResult) -> dict:
    g = res.graph
    mechs = {}
    for name, out in res.outcomes.items():
        entry = {
            "status": out.status,
            "assignment": out.assignment.as_ids(g),
            "proposals": out.proposals,
            "proposal_budget": out.budget,
            "negative_utility_pairs": out.negative_utility_pairs,
            "report": out.report,
            "summaries": {d: _summary(out.report[d]) for d in DISTRIBUTIONS},
        }
        if out.status == "cyclic_failure":
            entry["cycles"] = [[g.ids[k] for k in c] for c in out.cycles]
            entry["blocking_pair"] = None if out.blocking is None else [g.ids[k] for k in out.blocking]
        mechs[name] = entry
    return {
        "config": res.config.echo(),
        "instance": {
            "commuters": len(g),
            "pair_edges": len(g.pair_edges),
            "rejected": sorted(g.rejected),
        },
        "optimum": res.optimum.as_ids(g) | {
            "matched_pairs": len(res.optimum.pairs),
            "oracle_checked": res.oracle_checked,
        },
        "mechanisms": mechs,
        "notes": [RATIO_NOTE],
    }


def write_distribution_csvs(res: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """One long-format CSV per distribution: ``mechanism,index,value``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for dist in DISTRIBUTIONS:
        path = out_dir / f"{dist}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["mechanism", "index", "value"])
            for name, out in res.outcomes.items():
                for k, v in enumerate(out.report[dist]):
                    w.writerow([name, k, repr(v)])
        written.append(path)
    return written
