"""Road networks and shortest-path queries.

Two network flavours share one query surface (``leg(u, v)``):

* :class:`RoadNetwork` -- an explicit directed graph loaded from an edge list.
* :class:`GeometricNetwork` -- the implicit complete graph over GPS points used
  when trips come from a dataset without a street graph.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal

from .errors import InputError

TOL = 1e-9
EARTH_RADIUS_KM = 6371.0088

Objective = Literal["min-cost", "min-time"]


@dataclass(frozen=True)
class Segment:
    source: str
    target: str
    cost: float
    travel_time: float
    length_km: float | None = None


@dataclass(frozen=True)
class PathResult:
    waypoints: tuple[str, ...]
    cost: float
    travel_time: float
    length_km: float = 0.0


@dataclass
class RoadNetwork:
    """Directed road graph with per-segment cost and travel time.

    Parallel segments are allowed; a query always uses the cheapest one
    (ties on cost broken by shorter travel time). When a segment has no
    explicit length, its cost doubles as the length used for distance
    ratios.
    """

    junctions: set[str] = field(default_factory=set)
    segments: list[Segment] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._out: dict[str, dict[str, Segment]] = {}
        self._in: dict[str, dict[str, Segment]] = {}
        self._leg_cache: dict[tuple[str, str], PathResult | None] = {}
        for seg in list(self.segments):
            self._index(seg)

    def add_junction(self, name: str) -> None:
        self.junctions.add(name)

    def add_segment(self, source: str, target: str, cost: float,
                    travel_time: float, length_km: float | None = None) -> None:
        seg = Segment(source, target, float(cost), float(travel_time),
                      None if length_km is None else float(length_km))
        self.segments.append(seg)
        self._index(seg)

    def _index(self, seg: Segment) -> None:
        if seg.source not in self.junctions or seg.target not in self.junctions:
            raise InputError(f"segment {seg.source}->{seg.target} uses an undeclared junction")
        if seg.source == seg.target:
            raise InputError(f"self-loop segment at junction {seg.source}")
        if not (seg.cost >= 0 and math.isfinite(seg.cost)):
            raise InputError(f"segment {seg.source}->{seg.target}: cost must be >= 0")
        if not (seg.travel_time > 0 and math.isfinite(seg.travel_time)):
            raise InputError(f"segment {seg.source}->{seg.target}: travel time must be > 0")
        best = self._out.setdefault(seg.source, {}).get(seg.target)
        if best is None or (seg.cost, seg.travel_time) < (best.cost, best.travel_time):
            self._out[seg.source][seg.target] = seg
            self._in.setdefault(seg.target, {})[seg.source] = seg
        self._leg_cache.clear()

    def _check(self, *names: str) -> None:
        for name in names:
            if name not in self.junctions:
                raise InputError(f"unknown junction {name!r}")

    def leg(self, u: str, v: str) -> PathResult | None:
        """Min-cost route between two junctions (memoised)."""
        key = (u, v)
        if key not in self._leg_cache:
            self._leg_cache[key] = shortest_path(self, u, v)
        return self._leg_cache[key]

    def neighbours(self, u: str, reverse: bool = False) -> dict[str, Segment]:
        table = self._in if reverse else self._out
        return table.get(u, {})


def _weight(seg: Segment, objective: Objective) -> float:
    return seg.cost if objective == "min-cost" else seg.travel_time


def _dijkstra(net: RoadNetwork, origin: str, objective: Objective,
              reverse: bool = False) -> dict[str, float]:
    dist = {origin: 0.0}
    done: set[str] = set()
    heap = [(0.0, origin)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for w, seg in net.neighbours(u, reverse).items():
            nd = d + _weight(seg, objective)
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def shortest_path(net: RoadNetwork, source: str, target: str,
                  objective: Objective = "min-cost") -> PathResult | None:
    """Minimum-objective walk from ``source`` to ``target``.

    Among optimal walks (objective values within ``TOL``) the lexicographically
    smallest junction sequence is returned. ``None`` if unreachable.
    """
    net._check(source, target)
    if source == target:
        return PathResult((source,), 0.0, 0.0, 0.0)
    fwd = _dijkstra(net, source, objective)
    if target not in fwd:
        return None
    bwd = _dijkstra(net, target, objective, reverse=True)
    best = fwd[target]

    # Greedy walk along edges that lie on some optimal route, always taking
    # the smallest junction name.
    path = [source]
    seen = {source}
    u = source
    while u != target:
        nxt = None
        for w, seg in net.neighbours(u).items():
            if w in seen or w not in bwd:
                continue
            if fwd[u] + _weight(seg, objective) + bwd[w] <= best + TOL * max(1.0, abs(best)):
                if nxt is None or w < nxt:
                    nxt = w
        if nxt is None:
            raise InputError(f"zero-cost cycle blocks route {source}->{target}")
        path.append(nxt)
        seen.add(nxt)
        u = nxt

    cost = time = length = 0.0
    for a, b in zip(path, path[1:]):
        seg = net.neighbours(a)[b]
        cost += seg.cost
        time += seg.travel_time
        length += seg.cost if seg.length_km is None else seg.length_km
    return PathResult(tuple(path), cost, time, length)


def all_pairs_costs(net: RoadNetwork, terminals: Iterable[str],
                    objective: Objective = "min-cost") -> dict[tuple[str, str], PathResult]:
    """Shortest paths between every ordered pair of terminals.

    Unreachable pairs are absent from the returned table.
    """
    terms = sorted(set(terminals))
    net._check(*terms)
    table: dict[tuple[str, str], PathResult] = {}
    for u in terms:
        reach = _dijkstra(net, u, objective)
        for v in terms:
            if v in reach:
                res = shortest_path(net, u, v, objective)
                if res is not None:
                    table[(u, v)] = res
    return table


def load_road_network(path: str | Path) -> RoadNetwork:
    """Read an edge list: ``from_id,to_id,cost,travel_time_s[,length_km]``.

    A header line is optional; blank lines and ``#`` comments are skipped.
    """
    net = RoadNetwork()
    rows: list[tuple[int, list[str]]] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                    continue
                rows.append((lineno, [c.strip() for c in row]))
    except OSError as exc:
        raise InputError(f"cannot read road network {path}: {exc}") from exc
    if rows and rows[0][1][0] == "from_id":
        rows = rows[1:]
    parsed = []
    for lineno, row in rows:
        if len(row) not in (4, 5):
            raise InputError(f"{path}:{lineno}: expected 4 or 5 fields, got {len(row)}")
        try:
            length = float(row[4]) if len(row) == 5 and row[4] else None
            parsed.append((row[0], row[1], float(row[2]), float(row[3]), length))
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    for u, v, *_ in parsed:
        net.add_junction(u)
        net.add_junction(v)
    for u, v, cost, tt, length in parsed:
        net.add_segment(u, v, cost, tt, length)
    return net


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance between two (lon, lat) points in degrees."""
    lon1, lat1 = map(math.radians, a)
    lon2, lat2 = map(math.radians, b)
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


@dataclass
class FareModel:
    fare_base: float = 0.0
    fare_per_km: float = 1.55
    mean_speed_kmh: float = 20.0

    def __post_init__(self) -> None:
        if self.fare_base < 0 or self.fare_per_km < 0:
            raise InputError("fares must be >= 0")
        if self.mean_speed_kmh <= 0:
            raise InputError("mean speed must be > 0")


class GeometricNetwork:
    """Complete graph over GPS points.

    A leg between two distinct points costs ``fare_base + fare_per_km * d``
    and takes ``d / mean_speed`` hours, with ``d`` the great-circle distance.
    The direct edge is always optimal because great-circle distance obeys the
    triangle inequality and ``fare_base`` is charged per leg.
    """

    def __init__(self, fare: FareModel | None = None) -> None:
        self.fare = fare or FareModel()
        self.coords: dict[str, tuple[float, float]] = {}

    @staticmethod
    def junction_id(lon: float, lat: float) -> str:
        return f"{lon:.6f},{lat:.6f}"

    def add_point(self, lon: float, lat: float) -> str:
        name = self.junction_id(lon, lat)
        self.coords.setdefault(name, (float(lon), float(lat)))
        return name

    @property
    def junctions(self) -> set[str]:
        return set(self.coords)

    def distance_km(self, u: str, v: str) -> float:
        return haversine_km(self.coords[u], self.coords[v])

    def leg(self, u: str, v: str) -> PathResult | None:
        if u not in self.coords or v not in self.coords:
            raise InputError(f"unknown junction {u if u not in self.coords else v!r}")
        if u == v:
            return PathResult((u,), 0.0, 0.0, 0.0)
        d = self.distance_km(u, v)
        cost = self.fare.fare_base + self.fare.fare_per_km * d
        return PathResult((u, v), cost, d / self.fare.mean_speed_kmh * 3600.0, d)
