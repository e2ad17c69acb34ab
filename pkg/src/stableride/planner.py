"""Sharable-ride planning for commuter pairs and the matching graph.

A pair of commuters can share one vehicle in four waypoint orders. Writing
``(a; b)`` for an ordered pair:

* ``(a; b)``-hitchhiking: ``s_b, s_a, d_a, d_b`` (a's trip nested in b's)
* ``(a; b)``-combined:    ``s_a, s_b, d_a, d_b`` (on-board intervals interleave)

Each order is instantiated with min-cost legs between consecutive waypoints
and scheduled by a forward pass in which the vehicle may wait at pickups.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Protocol, Sequence

from .errors import InputError, InvariantError
from .road import TOL, PathResult

Kind = Literal["hitchhiking", "combined", "standalone"]
Role = Literal["pickup", "dropoff"]

# deterministic tie-break order among equal-cost pair plans
TOPOLOGY_ORDER = ("hitchhiking:ab", "hitchhiking:ba", "combined:ab", "combined:ba")


class LegProvider(Protocol):
    def leg(self, u: str, v: str) -> PathResult | None: ...


@dataclass(frozen=True)
class TripRequest:
    commuter_id: str
    source: str
    destination: str
    earliest_departure: float
    latest_arrival: float

    def __post_init__(self) -> None:
        if not self.earliest_departure < self.latest_arrival:
            raise InputError(f"trip {self.commuter_id}: earliest departure must precede latest arrival")
        if self.source == self.destination:
            raise InputError(f"trip {self.commuter_id}: source equals destination")


@dataclass(frozen=True)
class Waypoint:
    junction: str
    commuter: str
    role: Role
    arrival: float


@dataclass(frozen=True)
class SharedRidePlan:
    """A scheduled route serving one or two commuters.

    ``order`` holds the commuter ids in the ``(a; b)`` notation of the
    topology; for a standalone ride it is the single owner.
    ``segment_costs[k]`` is the cost of the leg from stop ``k`` to ``k + 1``.
    """

    kind: Kind
    order: tuple[str, ...]
    stops: tuple[Waypoint, ...]
    segment_costs: tuple[float, ...]
    segment_lengths: tuple[float, ...]
    total_cost: float
    rider_distances: dict[str, float] = field(hash=False, compare=False)

    @property
    def riders(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.order)))

    @property
    def topology(self) -> str:
        return f"{self.kind}({';'.join(self.order)})"

    def stop_index(self, commuter: str, role: Role) -> int:
        for k, stop in enumerate(self.stops):
            if stop.commuter == commuter and stop.role == role:
                return k
        raise KeyError((commuter, role))

    def cost_between(self, start: int, end: int) -> float:
        """Cost of the route from stop ``start`` to stop ``end``."""
        return math.fsum(self.segment_costs[start:end])

    def length_between(self, start: int, end: int) -> float:
        return math.fsum(self.segment_lengths[start:end])


def _schedule(stops: Sequence[tuple[str, TripRequest, Role]],
              legs: Sequence[PathResult]) -> list[float] | None:
    """Forward pass: wait at pickups until the rider's earliest departure.

    Returns arrival times, or ``None`` when a drop-off misses its deadline.
    """
    first_trip = stops[0][1]
    times = [first_trip.earliest_departure]
    for (junction, trip, role), leg in zip(stops[1:], legs):
        t = times[-1] + leg.travel_time
        if role == "pickup":
            t = max(t, trip.earliest_departure)
        elif t > trip.latest_arrival + TOL:
            return None
        times.append(t)
    return times


def _build(kind: Kind, order: tuple[TripRequest, ...],
           stops: Sequence[tuple[str, TripRequest, Role]],
           net: LegProvider, cache: dict[tuple[str, str], PathResult | None]) -> SharedRidePlan | None:
    legs = []
    for (u, _, _), (v, _, _) in zip(stops, stops[1:]):
        key = (u, v)
        if key not in cache:
            cache[key] = net.leg(u, v)
        if cache[key] is None:
            return None
        legs.append(cache[key])
    times = _schedule(stops, legs)
    if times is None:
        return None
    waypoints = tuple(Waypoint(j, t.commuter_id, r, at) for (j, t, r), at in zip(stops, times))
    costs = tuple(leg.cost for leg in legs)
    lengths = tuple(leg.length_km for leg in legs)
    rider_km = {}
    for trip in order:
        pick = next(k for k, s in enumerate(stops) if s[1] is trip and s[2] == "pickup")
        drop = next(k for k, s in enumerate(stops) if s[1] is trip and s[2] == "dropoff")
        rider_km[trip.commuter_id] = math.fsum(lengths[pick:drop])
    return SharedRidePlan(kind, tuple(t.commuter_id for t in order), waypoints,
                          costs, lengths, math.fsum(costs), rider_km)


def plan_standalone(net: LegProvider, trip: TripRequest) -> SharedRidePlan | None:
    """Min-cost direct ride; ``None`` if unreachable or too slow for the window."""
    stops = [(trip.source, trip, "pickup"), (trip.destination, trip, "dropoff")]
    return _build("standalone", (trip,), stops, net, {})


def _orderings(a: TripRequest, b: TripRequest):
    yield "hitchhiking", (a, b), [(b.source, b, "pickup"), (a.source, a, "pickup"),
                                  (a.destination, a, "dropoff"), (b.destination, b, "dropoff")]
    yield "hitchhiking", (b, a), [(a.source, a, "pickup"), (b.source, b, "pickup"),
                                  (b.destination, b, "dropoff"), (a.destination, a, "dropoff")]
    yield "combined", (a, b), [(a.source, a, "pickup"), (b.source, b, "pickup"),
                               (a.destination, a, "dropoff"), (b.destination, b, "dropoff")]
    yield "combined", (b, a), [(b.source, b, "pickup"), (a.source, a, "pickup"),
                               (b.destination, b, "dropoff"), (a.destination, a, "dropoff")]


def plan_pair_rides(net: LegProvider, a: TripRequest, b: TripRequest) -> list[SharedRidePlan]:
    """All time-feasible plans among the four waypoint orders, in topology order."""
    cache: dict[tuple[str, str], PathResult | None] = {}
    plans = []
    for kind, order, stops in _orderings(a, b):
        plan = _build(kind, order, stops, net, cache)
        if plan is not None:
            plans.append(plan)
    return plans


def min_cost_sharable_ride(net: LegProvider, a: TripRequest, b: TripRequest) -> SharedRidePlan | None:
    plans = plan_pair_rides(net, a, b)
    if not plans:
        return None
    cheapest = min(p.total_cost for p in plans)
    # plans come out in topology order, so the first near-minimal one wins ties
    return next(p for p in plans if p.total_cost <= cheapest + TOL)


def check_plan_feasible(plan: SharedRidePlan, trips: Iterable[TripRequest]) -> list[str]:
    """Independent audit of a plan's constraints; returns the violations found."""
    problems = []
    by_id = {t.commuter_id: t for t in trips}
    stops = plan.stops
    if abs(plan.total_cost - math.fsum(plan.segment_costs)) > TOL:
        problems.append("total cost differs from the sum of segment costs")
    if len(plan.segment_costs) != len(stops) - 1:
        problems.append("segment count does not match stop count")
    for k in range(len(stops) - 1):
        if stops[k + 1].arrival < stops[k].arrival - TOL:
            problems.append(f"arrival time decreases at stop {k + 1}")
    junctions = {s.junction for s in stops}
    for cid in plan.order:
        trip = by_id[cid]
        if trip.source not in junctions or trip.destination not in junctions:
            problems.append(f"{cid}: endpoint missing from route")
            continue
        pick, drop = plan.stop_index(cid, "pickup"), plan.stop_index(cid, "dropoff")
        if stops[pick].junction != trip.source or stops[drop].junction != trip.destination:
            problems.append(f"{cid}: pickup/dropoff at wrong junction")
        if not pick < drop:
            problems.append(f"{cid}: dropoff before pickup")
        t_pick, t_drop = stops[pick].arrival, stops[drop].arrival
        if t_pick < trip.earliest_departure - TOL:
            problems.append(f"{cid}: picked up before earliest departure")
        if not t_pick < t_drop:
            problems.append(f"{cid}: zero-duration on-board interval")
        if t_drop > trip.latest_arrival + TOL:
            problems.append(f"{cid}: arrives after latest arrival")
    if plan.kind != "standalone":
        a, b = plan.order
        # (arrival, position) realises the strict order even across zero-length legs
        key = {(s.commuter, s.role): (s.arrival, k) for k, s in enumerate(stops)}
        if plan.kind == "hitchhiking":
            seq = [(b, "pickup"), (a, "pickup"), (a, "dropoff"), (b, "dropoff")]
        else:
            seq = [(a, "pickup"), (b, "pickup"), (a, "dropoff"), (b, "dropoff")]
        keys = [key[s] for s in seq]
        if any(not x < y for x, y in zip(keys, keys[1:])):
            problems.append(f"{plan.kind} stop order violated")
    return problems


@dataclass
class MatchingGraph:
    """Commuters (sorted by id) with standalone and pairwise ride costs.

    Commuters are addressed by their index in ``commuters``; since the list is
    sorted, index order equals commuter-id order. ``pair_edges`` is keyed by
    ``(i, j)`` with ``i < j``.
    """

    commuters: list[TripRequest]
    self_costs: list[tuple[float, SharedRidePlan]]
    pair_edges: dict[tuple[int, int], tuple[float, SharedRidePlan]]
    rejected: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.index = {t.commuter_id: k for k, t in enumerate(self.commuters)}
        self.adjacency: list[list[int]] = [[] for _ in self.commuters]
        for i, j in sorted(self.pair_edges):
            self.adjacency[i].append(j)
            self.adjacency[j].append(i)

    def __len__(self) -> int:
        return len(self.commuters)

    @property
    def ids(self) -> list[str]:
        return [t.commuter_id for t in self.commuters]

    def self_cost(self, i: int) -> float:
        return self.self_costs[i][0]

    def edge(self, i: int, j: int) -> tuple[float, SharedRidePlan]:
        return self.pair_edges[(i, j) if i < j else (j, i)]

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self.pair_edges

    def check(self) -> None:
        for (i, j), (c, _) in self.pair_edges.items():
            if not i < j:
                raise InvariantError(f"pair edge key ({i}, {j}) not ordered")
            if c < max(self.self_cost(i), self.self_cost(j)) - TOL:
                raise InvariantError(
                    f"shared ride {self.commuters[i].commuter_id}/{self.commuters[j].commuter_id} "
                    f"costs {c} below a standalone ride")


def build_matching_graph(net: LegProvider, trips: Sequence[TripRequest],
                         pairing_window_s: float = math.inf) -> MatchingGraph:
    """Plan every standalone ride and every pair within the pairing window."""
    if pairing_window_s < 0:
        raise InputError("pairing window must be >= 0")
    seen: set[str] = set()
    for t in trips:
        if t.commuter_id in seen:
            raise InputError(f"duplicate commuter id {t.commuter_id!r}")
        seen.add(t.commuter_id)

    commuters: list[TripRequest] = []
    self_costs = []
    rejected = []
    for trip in sorted(trips, key=lambda t: t.commuter_id):
        plan = plan_standalone(net, trip)
        if plan is None:
            rejected.append((trip.commuter_id, "no standalone route within the time window"))
            continue
        commuters.append(trip)
        self_costs.append((plan.total_cost, plan))

    by_time = sorted(range(len(commuters)), key=lambda k: (commuters[k].earliest_departure, k))
    times = [commuters[k].earliest_departure for k in by_time]
    edges: dict[tuple[int, int], tuple[float, SharedRidePlan]] = {}
    for pos, i in enumerate(by_time):
        stop = bisect.bisect_right(times, times[pos] + pairing_window_s)
        for j in by_time[pos + 1:stop]:
            a, b = (i, j) if i < j else (j, i)
            plan = min_cost_sharable_ride(net, commuters[a], commuters[b])
            if plan is not None:
                edges[(a, b)] = (plan.total_cost, plan)
    graph = MatchingGraph(commuters, self_costs, dict(sorted(edges.items())), rejected)
    graph.check()
    return graph


def graph_from_costs(self_costs: dict[str, float],
                     pair_costs: dict[tuple[str, str], float]) -> MatchingGraph:
    """Matching graph from bare costs, for instances specified without a network.

    Plans are placeholders: standalone rides over a single leg and pair rides
    as combined rides whose middle leg carries the whole cost. Segment-based
    payments on such graphs therefore equal the equal split.
    """
    ids = sorted(self_costs)
    trips = [TripRequest(cid, f"{cid}:s", f"{cid}:d", 0.0, 1.0) for cid in ids]
    index = {cid: k for k, cid in enumerate(ids)}
    selfs = []
    for t in trips:
        c = float(self_costs[t.commuter_id])
        stops = (Waypoint(t.source, t.commuter_id, "pickup", 0.0),
                 Waypoint(t.destination, t.commuter_id, "dropoff", 1.0))
        selfs.append((c, SharedRidePlan("standalone", (t.commuter_id,), stops, (c,), (c,), c,
                                        {t.commuter_id: c})))
    edges = {}
    for (x, y), c in pair_costs.items():
        a, b = sorted((x, y))
        ta, tb = trips[index[a]], trips[index[b]]
        c = float(c)
        stops = (Waypoint(ta.source, a, "pickup", 0.0), Waypoint(tb.source, b, "pickup", 0.0),
                 Waypoint(ta.destination, a, "dropoff", 1.0), Waypoint(tb.destination, b, "dropoff", 1.0))
        plan = SharedRidePlan("combined", (a, b), stops, (0.0, c, 0.0), (0.0, c, 0.0), c,
                              {a: c, b: c})
        edges[(index[a], index[b])] = (c, plan)
    graph = MatchingGraph(trips, selfs, dict(sorted(edges.items())))
    graph.check()
    return graph
