"""Outcome measures for assignments: cost ratios, utilities, distributions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .costsharing import Mechanism
from .errors import InputError
from .matcher import Assignment, current_payments
from .planner import MatchingGraph
from .road import TOL


@dataclass
class MechanismReport:
    mechanism: str
    social_cost: float
    optimal_cost: float
    optimality_ratio: float
    social_utility: float
    matched_fraction: float
    matched_commuters: int
    matched_pairs: int
    normalized_utilities: list[float] = field(default_factory=list)
    standalone_cost_ratios: list[float] = field(default_factory=list)
    delay_ratios: list[float] = field(default_factory=list)
    separation_distances_km: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def optimality_ratio(stable: Assignment, optimum: Assignment) -> float:
    if stable.commuters() != optimum.commuters():
        raise InputError("assignments cover different commuters")
    if optimum.social_cost <= 0:
        raise InputError("optimal cost must be positive")
    return stable.social_cost / optimum.social_cost


def pair_measures(g: MatchingGraph, i: int, j: int) -> tuple[float, float, float]:
    """Standalone cost ratio, delay ratio and pickup separation (km) of a pair."""
    c_i, c_j = g.self_cost(i), g.self_cost(j)
    _, plan = g.edge(i, j)
    delays = []
    for k in (i, j):
        cid = g.commuters[k].commuter_id
        own = g.self_costs[k][1].rider_distances[cid]
        delays.append(plan.rider_distances[cid] / own if own > 0 else 1.0)
    # pickups are adjacent stops in every pair topology
    picks = sorted(k for k, s in enumerate(plan.stops) if s.role == "pickup")
    separation = plan.length_between(picks[0], picks[1])
    return min(c_i, c_j) / max(c_i, c_j), max(delays), separation


def commuter_distributions(a: Assignment, mech: Mechanism | str, g: MatchingGraph,
                           optimum: Assignment | None = None) -> MechanismReport:
    """Summaries of one assignment under one mechanism.

    Distributions cover matched commuters (or pairs) only. Without an
    ``optimum`` the ratio is reported against the assignment itself.
    """
    mech = Mechanism.parse(mech)
    n = len(g)
    pay = current_payments(a, mech, g)
    utilities = [g.self_cost(k) - pay[k] for k in range(n)]
    normalized = []
    cost_ratios, delays, separations = [], [], []
    for i, j in a.pairs:
        for k in (i, j):
            normalized.append(utilities[k] / g.self_cost(k))
        ratio, delay, sep = pair_measures(g, i, j)
        cost_ratios.append(ratio)
        delays.append(delay)
        separations.append(sep)
    opt = optimum if optimum is not None else a
    ratio = optimality_ratio(a, opt) if opt.social_cost > 0 else 1.0
    return MechanismReport(
        mechanism=mech.value,
        social_cost=a.social_cost,
        optimal_cost=opt.social_cost,
        optimality_ratio=ratio,
        social_utility=math.fsum(utilities),
        matched_fraction=2 * len(a.pairs) / n if n else 0.0,
        matched_commuters=2 * len(a.pairs),
        matched_pairs=len(a.pairs),
        normalized_utilities=normalized,
        standalone_cost_ratios=cost_ratios,
        delay_ratios=delays,
        separation_distances_km=separations,
    )


def social_utility_gap(report: MechanismReport, g: MatchingGraph) -> float:
    """Social utility minus (total standalone cost - social cost); zero by budget balance."""
    total_self = math.fsum(g.self_cost(k) for k in range(len(g)))
    return report.social_utility - (total_self - report.social_cost)


def within_bound(ratio: float, bound: float = 1.5) -> bool:
    return 1 - TOL <= ratio <= bound + TOL
